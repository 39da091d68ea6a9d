use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modality::Modality;

const DEFAULT_CONFIG: &str = include_str!("../data/default_config.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("list `{list}` entry `{entry}` is not a lowercase lemma")]
    NotLowercase { list: &'static str, entry: String },
    #[error("anaphora map entry `{0}` has an empty replacement")]
    EmptyAnaphora(String),
}

/// Keyword lists and switches that drive the extractor.
///
/// Fields missing from a user-supplied JSON file fall back to the bundled
/// defaults, so a file containing only `{"heuristics_enabled": false}` is a
/// complete rules-only configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub heuristics_enabled: bool,
    pub modal_keywords: BTreeMap<String, Modality>,
    pub obligation_predicates: Vec<String>,
    pub temporal_prepositions: Vec<String>,
    pub time_nouns: Vec<String>,
    pub time_markers: Vec<String>,
    pub condition_markers: Vec<String>,
    pub irrelevant_adverbs: Vec<String>,
    pub anaphora_map: BTreeMap<String, String>,
    /// Root predicates whose clausal complement is the real clause ("User understands that ...").
    pub introductory_predicates: Vec<String>,
    /// Adverbs that turn a clause coordination into a sequence.
    pub sequence_markers: Vec<String>,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        #[derive(Deserialize)]
        struct Raw {
            heuristics_enabled: bool,
            modal_keywords: BTreeMap<String, Modality>,
            obligation_predicates: Vec<String>,
            temporal_prepositions: Vec<String>,
            time_nouns: Vec<String>,
            time_markers: Vec<String>,
            condition_markers: Vec<String>,
            irrelevant_adverbs: Vec<String>,
            anaphora_map: BTreeMap<String, String>,
            introductory_predicates: Vec<String>,
            sequence_markers: Vec<String>,
        }
        let raw: Raw = serde_json::from_str(DEFAULT_CONFIG).expect("bundled config is valid JSON");
        ExtractionConfig {
            heuristics_enabled: raw.heuristics_enabled,
            modal_keywords: raw.modal_keywords,
            obligation_predicates: raw.obligation_predicates,
            temporal_prepositions: raw.temporal_prepositions,
            time_nouns: raw.time_nouns,
            time_markers: raw.time_markers,
            condition_markers: raw.condition_markers,
            irrelevant_adverbs: raw.irrelevant_adverbs,
            anaphora_map: raw.anaphora_map,
            introductory_predicates: raw.introductory_predicates,
            sequence_markers: raw.sequence_markers,
        }
    }
}

impl ExtractionConfig {
    /// Defaults with the heuristic layer switched off.
    pub fn rules_only() -> Self {
        ExtractionConfig {
            heuristics_enabled: false,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExtractionConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let lists: [(&'static str, &Vec<String>); 8] = [
            ("obligation_predicates", &self.obligation_predicates),
            ("temporal_prepositions", &self.temporal_prepositions),
            ("time_nouns", &self.time_nouns),
            ("time_markers", &self.time_markers),
            ("condition_markers", &self.condition_markers),
            ("irrelevant_adverbs", &self.irrelevant_adverbs),
            ("introductory_predicates", &self.introductory_predicates),
            ("sequence_markers", &self.sequence_markers),
        ];
        for (list, entries) in lists {
            if let Some(bad) = entries.iter().find(|e| **e != e.to_lowercase()) {
                return Err(ConfigError::NotLowercase {
                    list,
                    entry: bad.clone(),
                });
            }
        }
        if let Some(bad) = self.modal_keywords.keys().find(|k| **k != k.to_lowercase()) {
            return Err(ConfigError::NotLowercase {
                list: "modal_keywords",
                entry: bad.clone(),
            });
        }
        if let Some((k, _)) = self.anaphora_map.iter().find(|(_, v)| v.trim().is_empty()) {
            return Err(ConfigError::EmptyAnaphora(k.clone()));
        }
        Ok(())
    }

    pub(crate) fn listed(list: &[String], word: &str) -> bool {
        list.iter().any(|w| w == word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_hold_keyword_lists() {
        let cfg = ExtractionConfig::default();
        assert!(cfg.heuristics_enabled);
        assert_eq!(cfg.modal_keywords.get("can"), Some(&Modality::P));
        assert_eq!(cfg.modal_keywords.get("shall"), Some(&Modality::O));
        assert_eq!(cfg.modal_keywords.get("will"), Some(&Modality::O));
        for w in ["responsible", "liable", "require"] {
            assert!(ExtractionConfig::listed(&cfg.obligation_predicates, w));
        }
        for w in ["after", "before", "until", "during"] {
            assert!(ExtractionConfig::listed(&cfg.temporal_prepositions, w));
        }
        for w in ["day", "week", "month"] {
            assert!(ExtractionConfig::listed(&cfg.time_nouns, w));
        }
        assert_eq!(cfg.anaphora_map["our"], "<we>");
        assert_eq!(cfg.anaphora_map["you"], "User");
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_json_falls_back() {
        let cfg = ExtractionConfig::from_json(r#"{"heuristics_enabled": false}"#).unwrap();
        assert!(!cfg.heuristics_enabled);
        assert_eq!(cfg.time_nouns, ExtractionConfig::default().time_nouns);
    }

    #[test]
    fn rejects_uppercase_and_empty_tags() {
        assert!(matches!(
            ExtractionConfig::from_json(r#"{"time_nouns": ["Day"]}"#),
            Err(ConfigError::NotLowercase { .. })
        ));
        assert!(matches!(
            ExtractionConfig::from_json(r#"{"anaphora_map": {"we": ""}}"#),
            Err(ConfigError::EmptyAnaphora(_))
        ));
    }
}
