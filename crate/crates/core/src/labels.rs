//! Mapping Universal Dependencies relations onto classic Stanford labels.
//!
//! The extraction rules are written against Stanford Dependencies, so UD
//! parser output is relabelled on the way in. Nominal obliques and
//! modifiers that carry a `case` child are collapsed into `prep:<word>`
//! the way collapsed Stanford dependencies name prepositional relations.
//! Only labels change: heads and tokens are left alone.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::conllu::{DependencyTree, Token};

const DEFAULT_MAP: &str = include_str!("../data/ud_to_stanford.json");

/// One relabelling rule. Conditions, when present, must all hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRule {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upos: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feats: Option<BTreeMap<String, String>>,
}

impl LabelRule {
    fn is_conditional(&self) -> bool {
        self.lemma.is_some() || self.upos.is_some() || self.feats.is_some()
    }

    fn matches(&self, token: &Token) -> bool {
        if token.deprel != self.from {
            return false;
        }
        if let Some(lemmas) = &self.lemma {
            let lemma = token.lemma_lower();
            let surface = token.surface.to_lowercase();
            if !lemmas.iter().any(|l| *l == lemma || *l == surface) {
                return false;
            }
        }
        if let Some(upos) = &self.upos {
            if !upos.contains(&token.upos) {
                return false;
            }
        }
        if let Some(feats) = &self.feats {
            if !feats.iter().all(|(k, v)| token.feat(k) == Some(v.as_str())) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    /// The target vocabulary. `prep:<x>` labels are always canonical.
    pub canonical: BTreeSet<String>,
    /// Base labels that become `prep:<case word>` when they govern a `case` child.
    pub collapse: Vec<String>,
    pub rules: Vec<LabelRule>,
}

impl Default for LabelMap {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_MAP).expect("bundled label map is valid JSON")
    }
}

/// A label that neither a rule nor the canonical vocabulary covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelWarning {
    pub sentence_id: String,
    pub token: usize,
    pub label: String,
}

impl std::fmt::Display for LabelWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "sentence {}: token {} has unknown label `{}`",
            self.sentence_id, self.token, self.label
        )
    }
}

impl LabelMap {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn is_canonical(&self, label: &str) -> bool {
        label.starts_with("prep:") || self.canonical.contains(label)
    }

    fn relabel(&self, tree: &DependencyTree, token: &Token) -> Option<String> {
        if let Some(rule) = self
            .rules
            .iter()
            .find(|r| r.is_conditional() && r.matches(token))
        {
            return Some(rule.to.clone());
        }
        if !token.deprel.starts_with("prep:") {
            let base = token.deprel.split(':').next().unwrap_or_default();
            let exact_rule = self.rules.iter().any(|r| {
                !r.is_conditional() && r.from == token.deprel && token.deprel.contains(':')
            });
            if !exact_rule && self.collapse.iter().any(|c| c == base) {
                if let Some(prep) = case_word(tree, token.index) {
                    return Some(format!("prep:{prep}"));
                }
            }
        }
        if let Some(rule) = self
            .rules
            .iter()
            .find(|r| !r.is_conditional() && r.matches(token))
        {
            return Some(rule.to.clone());
        }
        None
    }
}

/// The preposition governed by `index` via `case`, as written (lowercased),
/// with multiword parts joined by `_`.
fn case_word(tree: &DependencyTree, index: usize) -> Option<String> {
    let mut parts = Vec::new();
    for case in tree.children_with(index, "case") {
        let word = case.surface.to_lowercase();
        if word == "'s" || word == "'" {
            continue;
        }
        let mut span = vec![(case.index, word)];
        for fixed in tree
            .children(case.index)
            .filter(|c| c.deprel == "fixed" || c.deprel == "mwe")
        {
            span.push((fixed.index, fixed.surface.to_lowercase()));
        }
        span.sort();
        parts.extend(span.into_iter().map(|(_, l)| l));
    }
    (!parts.is_empty()).then(|| parts.join("_"))
}

/// Rewrites every relation through `map`. Unknown labels are kept and reported.
pub fn map_labels(tree: &DependencyTree, map: &LabelMap) -> (DependencyTree, Vec<LabelWarning>) {
    let mut warnings = Vec::new();
    let mut out = tree.clone();
    for (slot, token) in out.tokens.iter_mut().zip(&tree.tokens) {
        match map.relabel(tree, token) {
            Some(label) => slot.deprel = label,
            None if map.is_canonical(&token.deprel) => {}
            None => warnings.push(LabelWarning {
                sentence_id: tree.sentence_id.clone(),
                token: token.index,
                label: token.deprel.clone(),
            }),
        }
    }
    (out, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(tokens: Vec<Token>) -> DependencyTree {
        DependencyTree::new("t", "", tokens).unwrap()
    }

    #[test]
    fn obj_becomes_dobj() {
        let t = tree(vec![
            Token::new(1, "Upload", "upload", "VERB", 0, "root"),
            Token::new(2, "code", "code", "NOUN", 1, "obj"),
        ]);
        let (mapped, warnings) = map_labels(&t, &LabelMap::default());
        assert_eq!(mapped.token(2).deprel, "dobj");
        assert!(warnings.is_empty());
    }

    #[test]
    fn obl_with_case_collapses() {
        // violate laws in your jurisdiction
        let t = tree(vec![
            Token::new(1, "violate", "violate", "VERB", 0, "root"),
            Token::new(2, "laws", "law", "NOUN", 1, "obj"),
            Token::new(3, "in", "in", "ADP", 5, "case"),
            Token::new(4, "your", "you", "PRON", 5, "nmod:poss"),
            Token::new(5, "jurisdiction", "jurisdiction", "NOUN", 1, "obl"),
        ]);
        let (mapped, _) = map_labels(&t, &LabelMap::default());
        assert_eq!(mapped.token(5).deprel, "prep:in");
        assert_eq!(mapped.token(4).deprel, "poss");
        assert_eq!(mapped.token(3).deprel, "case");
        assert_eq!(mapped.token(5).head, 1);
    }

    #[test]
    fn fixed_prepositions_join() {
        let t = tree(vec![
            Token::new(1, "communication", "communication", "NOUN", 0, "root"),
            Token::new(2, "such", "such", "ADJ", 4, "case"),
            Token::new(3, "as", "as", "ADP", 2, "fixed"),
            Token::new(4, "spam", "spam", "NOUN", 1, "nmod"),
        ]);
        let (mapped, _) = map_labels(&t, &LabelMap::default());
        assert_eq!(mapped.token(4).deprel, "prep:such_as");
        assert_eq!(mapped.token(3).deprel, "mwe");
    }

    #[test]
    fn agent_and_passive_labels() {
        let t = tree(vec![
            Token::new(1, "login", "login", "NOUN", 3, "nsubj:pass"),
            Token::new(2, "be", "be", "AUX", 3, "aux:pass"),
            Token::new(3, "used", "use", "VERB", 0, "root"),
            Token::new(4, "by", "by", "ADP", 5, "case"),
            Token::new(5, "person", "person", "NOUN", 3, "obl:agent"),
        ]);
        let (mapped, _) = map_labels(&t, &LabelMap::default());
        let labels: Vec<_> = mapped.tokens.iter().map(|t| t.deprel.as_str()).collect();
        assert_eq!(labels, ["nsubjpass", "auxpass", "root", "case", "agent"]);
    }

    #[test]
    fn negation_from_advmod() {
        let mut not = Token::new(1, "not", "not", "PART", 2, "advmod");
        not.feats.insert("Polarity".into(), "Neg".into());
        let t = tree(vec![not, Token::new(2, "go", "go", "VERB", 0, "root")]);
        let (mapped, _) = map_labels(&t, &LabelMap::default());
        assert_eq!(mapped.token(1).deprel, "neg");
    }

    #[test]
    fn canonical_tree_unchanged() {
        let t = tree(vec![
            Token::new(1, "You", "you", "PRON", 4, "nsubj"),
            Token::new(2, "will", "will", "AUX", 4, "aux"),
            Token::new(3, "not", "not", "PART", 4, "neg"),
            Token::new(4, "upload", "upload", "VERB", 0, "root"),
            Token::new(5, "viruses", "virus", "NOUN", 4, "dobj"),
            Token::new(6, "in", "in", "ADP", 7, "case"),
            Token::new(7, "bulk", "bulk", "NOUN", 4, "prep:in"),
        ]);
        let (mapped, warnings) = map_labels(&t, &LabelMap::default());
        assert_eq!(mapped, t);
        assert!(warnings.is_empty());
    }

    #[test]
    fn unknown_label_kept_and_flagged() {
        let t = tree(vec![
            Token::new(1, "go", "go", "VERB", 0, "root"),
            Token::new(2, "x", "x", "X", 1, "weird"),
        ]);
        let (mapped, warnings) = map_labels(&t, &LabelMap::default());
        assert_eq!(mapped.token(2).deprel, "weird");
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].token, 2);
    }

    #[test]
    fn total_on_ud_core_labels() {
        let core = [
            "nsubj",
            "obj",
            "iobj",
            "csubj",
            "ccomp",
            "xcomp",
            "obl",
            "vocative",
            "expl",
            "dislocated",
            "advcl",
            "advmod",
            "discourse",
            "aux",
            "cop",
            "mark",
            "nmod",
            "appos",
            "nummod",
            "acl",
            "amod",
            "det",
            "clf",
            "case",
            "conj",
            "cc",
            "fixed",
            "flat",
            "compound",
            "list",
            "parataxis",
            "orphan",
            "goeswith",
            "reparandum",
            "punct",
            "root",
            "dep",
        ];
        let map = LabelMap::default();
        for label in core {
            let t = tree(vec![
                Token::new(1, "a", "a", "X", 0, "root"),
                Token::new(2, "b", "b", "X", 1, label),
            ]);
            let (mapped, warnings) = map_labels(&t, &map);
            assert!(warnings.is_empty(), "{label} not covered");
            assert!(
                map.is_canonical(&mapped.token(2).deprel),
                "{label} maps outside vocabulary"
            );
        }
    }
}
