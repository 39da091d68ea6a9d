//! The clause table: extracted rows grouped by source sentence, and its
//! tab-separated post-editing format (tabs shown as two spaces below).
//!
//! ```text
//! Refinement  Modality  Subject  Verb  Object  Time  Adverbials  Conditions  Notes
//! #@document  <document id>           (only when the id is non-empty)
//! # <sentence id>  <sentence text>
//! #! <diagnostic>                      (before an incomplete row)
//!   F  User  upload  virus
//! OR  F  User  upload  other malicious code
//! ```
//!
//! List cells hold attributed phrases `S: ...`, `V: ...`, `O: ...` joined
//! by ` | `. Backslash, tab, newline and `|` inside a value are escaped as
//! `\\`, `\t`, `\n` and `\|`.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modality::{Modality, Refinement};

pub const HEADER: [&str; 9] = [
    "Refinement",
    "Modality",
    "Subject",
    "Verb",
    "Object",
    "Time",
    "Adverbials",
    "Conditions",
    "Notes",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Validation { line: usize, message: String },
    #[error("input is not valid UTF-8")]
    Encoding,
}

/// The element a phrase modifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Attachment {
    S,
    V,
    O,
}

impl fmt::Display for Attachment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attachment::S => "S",
            Attachment::V => "V",
            Attachment::O => "O",
        })
    }
}

impl FromStr for Attachment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" => Ok(Attachment::S),
            "V" => Ok(Attachment::V),
            "O" => Ok(Attachment::O),
            other => Err(format!("unknown attachment `{other}`")),
        }
    }
}

/// A phrase tagged with the element it attaches to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attributed {
    pub attachment: Attachment,
    pub text: String,
}

impl Attributed {
    pub fn new(attachment: Attachment, text: impl Into<String>) -> Self {
        Attributed {
            attachment,
            text: text.into(),
        }
    }
}

impl fmt::Display for Attributed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.attachment, self.text)
    }
}

/// One extracted clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseRow {
    pub refinement: Option<Refinement>,
    pub modality: Modality,
    pub subject: String,
    pub verb: String,
    pub object: Option<String>,
    pub time: Vec<Attributed>,
    pub adverbials: Vec<Attributed>,
    pub conditions: Vec<Attributed>,
    pub notes: Vec<Attributed>,
    /// Set on rows the extractor could not complete.
    pub diagnostic: Option<String>,
}

impl ClauseRow {
    pub fn new(modality: Modality, subject: &str, verb: &str, object: Option<&str>) -> Self {
        ClauseRow {
            refinement: None,
            modality,
            subject: subject.to_string(),
            verb: verb.to_string(),
            object: object.map(str::to_string),
            time: Vec::new(),
            adverbials: Vec::new(),
            conditions: Vec::new(),
            notes: Vec::new(),
            diagnostic: None,
        }
    }

    pub fn with_refinement(mut self, refinement: Refinement) -> Self {
        self.refinement = Some(refinement);
        self
    }

    pub fn is_incomplete(&self) -> bool {
        self.verb.is_empty() || self.diagnostic.is_some()
    }

    /// Every attributed phrase across the four modifier fields.
    pub fn modifiers(&self) -> impl Iterator<Item = &Attributed> {
        self.time
            .iter()
            .chain(&self.adverbials)
            .chain(&self.conditions)
            .chain(&self.notes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceGroup {
    pub sentence_id: String,
    pub text: String,
    pub rows: Vec<ClauseRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseTable {
    pub document_id: String,
    pub groups: Vec<SentenceGroup>,
}

impl ClauseTable {
    pub fn new(document_id: impl Into<String>) -> Self {
        ClauseTable {
            document_id: document_id.into(),
            groups: Vec::new(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &ClauseRow> {
        self.groups.iter().flat_map(|g| &g.rows)
    }

    /// Checks the refinement invariant: none on a group's first row, present on the rest.
    pub fn check(&self) -> Result<(), String> {
        for g in &self.groups {
            for (k, row) in g.rows.iter().enumerate() {
                match (k, row.refinement) {
                    (0, Some(r)) => {
                        return Err(format!(
                            "sentence {}: first row carries refinement {r}",
                            g.sentence_id
                        ))
                    }
                    (k, None) if k > 0 => {
                        return Err(format!(
                            "sentence {}: row {} has no refinement",
                            g.sentence_id,
                            k + 1
                        ))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '|' => out.push_str("\\|"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

fn render_list(items: &[Attributed]) -> String {
    items
        .iter()
        .map(|a| format!("{}: {}", a.attachment, escape(&a.text)))
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Splits on unescaped `|`.
fn split_list(cell: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut chars = cell.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                cur.push(c);
                if let Some(n) = chars.next() {
                    cur.push(n);
                }
            }
            '|' => parts.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    parts.push(cur);
    parts
}

fn parse_list(cell: &str, line: usize, column: &str) -> Result<Vec<Attributed>, TableError> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(Vec::new());
    }
    split_list(cell)
        .into_iter()
        .map(|part| {
            let part = part.trim();
            let (tag, text) = part.split_once(':').ok_or_else(|| TableError::Validation {
                line,
                message: format!("{column}: phrase `{part}` lacks an S:/V:/O: prefix"),
            })?;
            let attachment = tag.trim().parse().map_err(|e| TableError::Validation {
                line,
                message: format!("{column}: {e}"),
            })?;
            Ok(Attributed::new(attachment, unescape(text.trim())))
        })
        .collect()
}

/// Renders the table in the tab-separated post-editing format.
pub fn to_tsv(table: &ClauseTable) -> String {
    let mut out = HEADER.join("\t");
    out.push('\n');
    if !table.document_id.is_empty() {
        let _ = writeln!(out, "#@document\t{}", escape(&table.document_id));
    }
    for g in &table.groups {
        let _ = writeln!(out, "# {}\t{}", escape(&g.sentence_id), escape(&g.text));
        for row in &g.rows {
            if let Some(d) = &row.diagnostic {
                let _ = writeln!(out, "#! {}", escape(d));
            }
            let cells = [
                row.refinement
                    .map(|r| r.as_str().to_string())
                    .unwrap_or_default(),
                row.modality.to_string(),
                escape(&row.subject),
                escape(&row.verb),
                row.object.as_deref().map(escape).unwrap_or_default(),
                render_list(&row.time),
                render_list(&row.adverbials),
                render_list(&row.conditions),
                render_list(&row.notes),
            ];
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
    }
    out
}

/// Parses the tab-separated format back into a table, validating every row.
pub fn from_tsv(input: &[u8]) -> Result<ClauseTable, TableError> {
    let text = std::str::from_utf8(input).map_err(|_| TableError::Encoding)?;
    from_tsv_str(text)
}

pub fn from_tsv_str(text: &str) -> Result<ClauseTable, TableError> {
    let mut table = ClauseTable::default();
    let mut pending_diag: Option<String> = None;
    let mut seen_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| TableError::Validation {
            line: line_no,
            message,
        };
        if !seen_header {
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols != HEADER {
                return Err(err(format!("expected header `{}`", HEADER.join("\\t"))));
            }
            seen_header = true;
            continue;
        }
        if let Some(id) = line.strip_prefix("#@document\t") {
            table.document_id = unescape(id.trim());
            continue;
        }
        if let Some(diag) = line.strip_prefix("#!") {
            pending_diag = Some(unescape(diag.trim()));
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.strip_prefix(' ').unwrap_or(comment);
            let (id, text) = comment.split_once('\t').unwrap_or((comment, ""));
            table.groups.push(SentenceGroup {
                sentence_id: unescape(id.trim()),
                text: unescape(text.trim()),
                rows: Vec::new(),
            });
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != HEADER.len() {
            return Err(err(format!(
                "expected {} columns, found {}",
                HEADER.len(),
                cols.len()
            )));
        }
        let group = table
            .groups
            .last_mut()
            .ok_or_else(|| err("row appears before any `# <sentence id>` line".into()))?;
        let refinement = match cols[0].trim() {
            "" => None,
            r => Some(r.parse::<Refinement>().map_err(err)?),
        };
        match (group.rows.is_empty(), refinement) {
            (true, Some(r)) => {
                return Err(err(format!(
                    "refinement {r} on the first row of sentence {}",
                    group.sentence_id
                )))
            }
            (false, None) => {
                return Err(err(format!(
                    "missing refinement on a follow-up row of sentence {}",
                    group.sentence_id
                )))
            }
            _ => {}
        }
        let modality = cols[1].trim().parse::<Modality>().map_err(err)?;
        let object = unescape(cols[4].trim());
        group.rows.push(ClauseRow {
            refinement,
            modality,
            subject: unescape(cols[2].trim()),
            verb: unescape(cols[3].trim()),
            object: (!object.is_empty()).then_some(object),
            time: parse_list(cols[5], line_no, "Time")?,
            adverbials: parse_list(cols[6], line_no, "Adverbials")?,
            conditions: parse_list(cols[7], line_no, "Conditions")?,
            notes: parse_list(cols[8], line_no, "Notes")?,
            diagnostic: pending_diag.take(),
        });
    }
    if !seen_header {
        return Err(TableError::Validation {
            line: 1,
            message: "missing header row".into(),
        });
    }
    Ok(table)
}
