//! Precision, recall and F1 of an extracted clause table against a gold table.
//!
//! Scored fields are Subject, Verb, Object and Modality. Within each sentence
//! output rows are paired greedily with gold rows; a field point is awarded
//! when a paired output value equals the gold value, compared
//! case-insensitively after whitespace normalization (or on the last word
//! only, in lenient mode). Only non-empty values count. Aggregates are
//! micro-averaged over all field instances.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{ClauseRow, ClauseTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("sentence ids differ: only in output {only_output:?}, only in gold {only_gold:?}")]
    SentenceMismatch {
        only_output: Vec<String>,
        only_gold: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Field {
    Subject,
    Verb,
    Object,
    Modality,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::Subject, Field::Verb, Field::Object, Field::Modality];

    fn value(self, row: &ClauseRow) -> String {
        match self {
            Field::Subject => row.subject.clone(),
            Field::Verb => row.verb.clone(),
            Field::Object => row.object.clone().unwrap_or_default(),
            Field::Modality => row.modality.to_string(),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigLabel {
    RulesOnly,
    RulesAndHeuristics,
}

impl ConfigLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfigLabel::RulesOnly => "rules_only",
            ConfigLabel::RulesAndHeuristics => "rules_and_heuristics",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counts {
    pub matched: usize,
    pub output_total: usize,
    pub gold_total: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.matched += o.matched;
        self.output_total += o.output_total;
        self.gold_total += o.gold_total;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize, other_den: usize) -> f64 {
    match (den, other_den) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => num as f64 / den as f64,
    }
}

impl Metrics {
    /// Metrics from raw counts. Nothing to output and nothing expected scores
    /// 1.0; any other zero denominator scores 0.
    pub fn from_counts(c: Counts) -> Self {
        Self::from_pr(
            ratio(c.matched, c.output_total, c.gold_total),
            ratio(c.matched, c.gold_total, c.output_total),
        )
    }

    /// Metrics from a known precision and recall; F1 is their harmonic mean.
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics {
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldScore {
    pub field: Field,
    pub counts: Counts,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub document_id: String,
    pub config_label: ConfigLabel,
    /// One entry per scored field; empty for reports built from published figures.
    pub per_field: Vec<FieldScore>,
    pub counts: Counts,
    pub aggregate: Metrics,
}

impl ScoreReport {
    pub fn from_metrics(document_id: &str, config_label: ConfigLabel, aggregate: Metrics) -> Self {
        ScoreReport {
            document_id: document_id.to_string(),
            config_label,
            per_field: Vec::new(),
            counts: Counts::default(),
            aggregate,
        }
    }

    pub fn field(&self, field: Field) -> Option<&FieldScore> {
        self.per_field.iter().find(|f| f.field == field)
    }
}

fn normalize(value: &str, lenient: bool) -> String {
    let lower = value.to_lowercase();
    let mut words = lower.split_whitespace();
    if lenient {
        words.next_back().unwrap_or_default().to_string()
    } else {
        words.collect::<Vec<_>>().join(" ")
    }
}

type Values = [String; 4];

fn values(row: &ClauseRow, lenient: bool) -> Values {
    Field::ALL.map(|f| normalize(&f.value(row), lenient))
}

fn field_matches(a: &Values, b: &Values) -> [bool; 4] {
    std::array::from_fn(|k| !a[k].is_empty() && a[k] == b[k])
}

/// Pairs output rows with gold rows, best pairs first. The ordering key is
/// symmetric in its two rows, so swapping output and gold yields the same
/// pairs.
fn pair_rows(out: &[Values], gold: &[Values]) -> Vec<(usize, usize)> {
    let verb = Field::Verb as usize;
    let object = Field::Object as usize;
    let mut candidates: Vec<(usize, usize)> = (0..out.len())
        .flat_map(|i| (0..gold.len()).map(move |j| (i, j)))
        .collect();
    let key = |&(i, j): &(usize, usize)| {
        let m = field_matches(&out[i], &gold[j]);
        let action = out[i][verb] == gold[j][verb] && out[i][object] == gold[j][object];
        let (lo, hi) = if out[i] <= gold[j] {
            (&out[i], &gold[j])
        } else {
            (&gold[j], &out[i])
        };
        (
            action,
            m.iter().filter(|x| **x).count(),
            lo.clone(),
            hi.clone(),
            i.min(j),
            i.max(j),
        )
    };
    candidates.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        kb.0.cmp(&ka.0)
            .then(kb.1.cmp(&ka.1))
            .then(ka.2.cmp(&kb.2))
            .then(ka.3.cmp(&kb.3))
            .then(ka.4.cmp(&kb.4))
            .then(ka.5.cmp(&kb.5))
            .then(Ordering::Equal)
    });
    let mut used_out = BTreeSet::new();
    let mut used_gold = BTreeSet::new();
    let mut pairs = Vec::new();
    for (i, j) in candidates {
        if !used_out.contains(&i) && !used_gold.contains(&j) {
            used_out.insert(i);
            used_gold.insert(j);
            pairs.push((i, j));
        }
    }
    pairs
}

/// Scores `output` against `gold`. Both tables must cover the same sentences.
pub fn score(
    output: &ClauseTable,
    gold: &ClauseTable,
    config_label: ConfigLabel,
    lenient: bool,
) -> Result<ScoreReport, EvalError> {
    let out_ids: BTreeSet<&str> = output
        .groups
        .iter()
        .map(|g| g.sentence_id.as_str())
        .collect();
    let gold_ids: BTreeSet<&str> = gold.groups.iter().map(|g| g.sentence_id.as_str()).collect();
    if out_ids != gold_ids {
        return Err(EvalError::SentenceMismatch {
            only_output: out_ids
                .difference(&gold_ids)
                .map(|s| s.to_string())
                .collect(),
            only_gold: gold_ids
                .difference(&out_ids)
                .map(|s| s.to_string())
                .collect(),
        });
    }

    let mut counts = [Counts::default(); 4];
    let mut ids: Vec<&str> = Vec::new();
    for g in &gold.groups {
        if !ids.contains(&g.sentence_id.as_str()) {
            ids.push(&g.sentence_id);
        }
    }
    let rows_of = |t: &ClauseTable, id: &str| -> Vec<Values> {
        t.groups
            .iter()
            .filter(|g| g.sentence_id == id)
            .flat_map(|g| g.rows.iter())
            .map(|r| values(r, lenient))
            .collect()
    };
    for id in ids {
        let out_rows = rows_of(output, id);
        let gold_rows = rows_of(gold, id);
        for (k, c) in counts.iter_mut().enumerate() {
            c.output_total += out_rows.iter().filter(|v| !v[k].is_empty()).count();
            c.gold_total += gold_rows.iter().filter(|v| !v[k].is_empty()).count();
        }
        for (i, j) in pair_rows(&out_rows, &gold_rows) {
            for (k, hit) in field_matches(&out_rows[i], &gold_rows[j])
                .into_iter()
                .enumerate()
            {
                counts[k].matched += hit as usize;
            }
        }
    }

    let mut total = Counts::default();
    let per_field = Field::ALL
        .iter()
        .zip(counts)
        .map(|(&field, c)| {
            total += c;
            FieldScore {
                field,
                counts: c,
                metrics: Metrics::from_counts(c),
            }
        })
        .collect();
    Ok(ScoreReport {
        document_id: gold.document_id.clone(),
        config_label,
        per_field,
        counts: total,
        aggregate: Metrics::from_counts(total),
    })
}

/// One line per document: the two configuration blocks side by side.
fn rows_by_document(reports: &[ScoreReport]) -> Vec<(String, [Option<Metrics>; 2])> {
    let mut docs: Vec<(String, [Option<Metrics>; 2])> = Vec::new();
    for r in reports {
        let slot = match r.config_label {
            ConfigLabel::RulesOnly => 0,
            ConfigLabel::RulesAndHeuristics => 1,
        };
        match docs.iter_mut().find(|(d, _)| *d == r.document_id) {
            Some((_, blocks)) => blocks[slot] = Some(r.aggregate),
            None => {
                let mut blocks = [None, None];
                blocks[slot] = Some(r.aggregate);
                docs.push((r.document_id.clone(), blocks));
            }
        }
    }
    docs
}

fn cells(m: Option<Metrics>) -> [String; 3] {
    match m {
        Some(m) => [m.precision, m.recall, m.f1].map(|x| format!("{x:.2}")),
        None => ["—", "—", "—"].map(String::from),
    }
}

/// Plain-text report with "Rules only" and "Rules & heuristics" blocks.
pub fn report_text(reports: &[ScoreReport]) -> String {
    let docs = rows_by_document(reports);
    let width = docs
        .iter()
        .map(|(d, _)| d.chars().count())
        .chain([8])
        .max()
        .unwrap_or(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:width$}  {:<22}  Rules & heuristics",
        "", "Rules only"
    );
    let _ = writeln!(
        out,
        "{:width$}  {:>6}{:>8}{:>8}  {:>6}{:>8}{:>8}",
        "Document", "P", "R", "F1", "P", "R", "F1"
    );
    for (doc, blocks) in docs {
        let [a, b] = blocks.map(cells);
        let _ = writeln!(
            out,
            "{doc:width$}  {:>6}{:>8}{:>8}  {:>6}{:>8}{:>8}",
            a[0], a[1], a[2], b[0], b[1], b[2]
        );
    }
    out
}

/// Tab-separated report, same layout as [`report_text`].
pub fn report_tsv(reports: &[ScoreReport]) -> String {
    let mut out = String::from(
        "document\trules_only_precision\trules_only_recall\trules_only_f1\t\
         rules_and_heuristics_precision\trules_and_heuristics_recall\trules_and_heuristics_f1\n",
    );
    for (doc, blocks) in rows_by_document(reports) {
        let [a, b] = blocks.map(cells);
        let _ = writeln!(out, "{doc}\t{}\t{}", a.join("\t"), b.join("\t"));
    }
    out
}

/// Per-field breakdown of a single report.
pub fn report_fields(report: &ScoreReport) -> String {
    let mut out = format!(
        "{} ({})\n",
        report.document_id,
        report.config_label.as_str()
    );
    let _ = writeln!(
        out,
        "{:<10}{:>8}{:>8}{:>8}{:>10}{:>8}{:>8}",
        "field", "P", "R", "F1", "matched", "output", "gold"
    );
    let line = |out: &mut String, name: &str, c: Counts, m: Metrics| {
        let _ = writeln!(
            out,
            "{name:<10}{:>8.2}{:>8.2}{:>8.2}{:>10}{:>8}{:>8}",
            m.precision, m.recall, m.f1, c.matched, c.output_total, c.gold_total
        );
    };
    for f in &report.per_field {
        line(&mut out, &f.field.to_string(), f.counts, f.metrics);
    }
    line(&mut out, "all", report.counts, report.aggregate);
    out
}
