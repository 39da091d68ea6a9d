use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::ExtractionConfig;
use crate::conllu::Token;

/// Deontic classification of a clause.
///
/// Ordered by override strength: a prohibition beats an obligation, which
/// beats a permission. Declarations carry no deontic signal at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modality {
    D,
    P,
    O,
    F,
}

impl Modality {
    pub const ALL: [Modality; 4] = [Modality::O, Modality::P, Modality::F, Modality::D];

    pub fn letter(self) -> char {
        match self {
            Modality::O => 'O',
            Modality::P => 'P',
            Modality::F => 'F',
            Modality::D => 'D',
        }
    }

    /// Join in the override lattice.
    pub fn join(self, other: Modality) -> Modality {
        self.max(other)
    }

    /// Negating an obligation or a permission yields a prohibition.
    pub fn negated(self) -> Modality {
        match self {
            Modality::O | Modality::P => Modality::F,
            m => m,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "O" => Ok(Modality::O),
            "P" => Ok(Modality::P),
            "F" => Ok(Modality::F),
            "D" => Ok(Modality::D),
            other => Err(format!("unknown modality `{other}`")),
        }
    }
}

/// How a clause attaches to the preceding clause of the same sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Refinement {
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
    #[serde(rename = "SEQ")]
    Seq,
}

impl Refinement {
    pub fn as_str(self) -> &'static str {
        match self {
            Refinement::And => "AND",
            Refinement::Or => "OR",
            Refinement::Seq => "SEQ",
        }
    }
}

impl fmt::Display for Refinement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Refinement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AND" => Ok(Refinement::And),
            "OR" => Ok(Refinement::Or),
            "SEQ" => Ok(Refinement::Seq),
            other => Err(format!("unknown refinement `{other}`")),
        }
    }
}

/// Modal keywords that hold regardless of the heuristic layer.
const RULE_KEYWORDS: [(&str, Modality); 2] = [("may", Modality::P), ("must", Modality::O)];

/// Modality contributed by a single lexical signal, if any.
pub fn signal_modality(word: &str, config: &ExtractionConfig) -> Modality {
    let word = word.to_lowercase();
    let mut m = RULE_KEYWORDS
        .iter()
        .find(|(k, _)| *k == word)
        .map(|(_, m)| *m)
        .unwrap_or(Modality::D);
    if config.heuristics_enabled {
        if let Some(k) = config.modal_keywords.get(&word) {
            m = m.join(*k);
        }
        if config.obligation_predicates.contains(&word) {
            m = m.join(Modality::O);
        }
    }
    m
}

/// Combines signals through the lattice, then applies negation.
pub fn modality_from_signals<'a, I>(
    signals: I,
    negated: bool,
    config: &ExtractionConfig,
) -> Modality
where
    I: IntoIterator<Item = &'a str>,
{
    let m = signals
        .into_iter()
        .map(|s| signal_modality(s, config))
        .fold(Modality::D, Modality::join);
    if negated {
        m.negated()
    } else {
        m
    }
}

/// Classifies a predicate from its lemma, its `aux` dependents and negation.
pub fn classify_modality(
    verb: &Token,
    aux: &[&Token],
    negated: bool,
    config: &ExtractionConfig,
) -> Modality {
    let lemmas: Vec<String> = aux.iter().map(|t| t.lemma_lower()).collect();
    let predicate = verb.lemma_lower();
    modality_from_signals(
        lemmas
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(predicate.as_str())),
        negated,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aux(word: &str) -> Token {
        Token::new(1, word, word, "AUX", 2, "aux")
    }

    fn verb(lemma: &str) -> Token {
        Token::new(2, lemma, lemma, "VERB", 0, "root")
    }

    #[test]
    fn must_not_is_prohibition() {
        let cfg = ExtractionConfig::default();
        assert_eq!(
            classify_modality(&verb("violate"), &[&aux("must")], true, &cfg),
            Modality::F
        );
    }

    #[test]
    fn may_is_permission() {
        let cfg = ExtractionConfig::default();
        assert_eq!(
            classify_modality(&verb("use"), &[&aux("may")], false, &cfg),
            Modality::P
        );
    }

    #[test]
    fn will_not_depends_on_heuristics() {
        let cfg = ExtractionConfig::default();
        assert_eq!(
            classify_modality(&verb("post"), &[&aux("will")], true, &cfg),
            Modality::F
        );
        let rules = ExtractionConfig::rules_only();
        assert_eq!(
            classify_modality(&verb("post"), &[&aux("will")], true, &rules),
            Modality::D
        );
    }

    #[test]
    fn predicate_cue() {
        let cfg = ExtractionConfig::default();
        assert_eq!(
            classify_modality(&verb("require"), &[], false, &cfg),
            Modality::O
        );
        assert_eq!(
            classify_modality(&verb("own"), &[], false, &cfg),
            Modality::D
        );
    }

    #[test]
    fn obligation_overrides_permission() {
        let cfg = ExtractionConfig::default();
        assert_eq!(
            modality_from_signals(["may", "must"], false, &cfg),
            Modality::O
        );
        assert_eq!(
            modality_from_signals(["must", "may"], false, &cfg),
            Modality::O
        );
    }

    #[test]
    fn parse_letters() {
        for m in Modality::ALL {
            assert_eq!(m.letter().to_string().parse::<Modality>().unwrap(), m);
        }
        assert!("X".parse::<Modality>().is_err());
    }
}
