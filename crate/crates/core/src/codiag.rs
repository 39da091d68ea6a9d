//! C-O Diagram models built from clause tables.
//!
//! A diagram is a forest of boxes. Leaves carry a modality and an action;
//! refined boxes join two or more children by AND, OR or SEQ. Guards and
//! time restrictions are kept as uninterpreted strings.
//!
//! The JSON form mirrors the types below, with `"kind": "leaf" | "refined"`
//! on box contents and `"kind": "bottom" | "clause"` on reparations. See
//! `data/codiagram.schema.json`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modality::{Modality, Refinement};
use crate::table::{ClauseRow, ClauseTable};

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("sentence {sentence_id}, row {row}: empty Verb (a box needs an action)")]
    EmptyVerb { sentence_id: String, row: usize },
    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub verb: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Content {
    Leaf {
        modality: Modality,
        action: Action,
    },
    Refined {
        connective: Refinement,
        children: Vec<DiagramBox>,
    },
}

/// What applies when a box is violated: nothing further (⊥) or another clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Reparation {
    Bottom,
    Clause { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramBox {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent: Option<String>,
    pub guard: Vec<String>,
    pub time_restriction: Vec<String>,
    pub content: Content,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reparation: Option<Reparation>,
    /// Adverbials and notes carried over from the clause table.
    pub annotations: Vec<String>,
}

impl DiagramBox {
    pub fn leaf(
        name: &str,
        agent: Option<&str>,
        modality: Modality,
        verb: &str,
        object: Option<&str>,
    ) -> Self {
        DiagramBox {
            name: name.to_string(),
            agent: agent.map(str::to_string),
            guard: Vec::new(),
            time_restriction: Vec::new(),
            content: Content::Leaf {
                modality,
                action: Action {
                    verb: verb.to_string(),
                    object: object.map(str::to_string),
                },
            },
            reparation: None,
            annotations: Vec::new(),
        }
    }

    pub fn refined(name: &str, connective: Refinement, children: Vec<DiagramBox>) -> Self {
        DiagramBox {
            name: name.to_string(),
            agent: None,
            guard: Vec::new(),
            time_restriction: Vec::new(),
            content: Content::Refined {
                connective,
                children,
            },
            reparation: None,
            annotations: Vec::new(),
        }
    }

    pub fn modality(&self) -> Option<Modality> {
        match &self.content {
            Content::Leaf { modality, .. } => Some(*modality),
            Content::Refined { .. } => None,
        }
    }

    pub fn children(&self) -> &[DiagramBox] {
        match &self.content {
            Content::Leaf { .. } => &[],
            Content::Refined { children, .. } => children,
        }
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a DiagramBox>) {
        out.push(self);
        for c in self.children() {
            c.walk(out);
        }
    }
}

/// A fact stated by a declaration (D) row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub subject: String,
    pub verb: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct CODiagram {
    pub document_id: String,
    pub roots: Vec<DiagramBox>,
    pub declarations: Vec<Declaration>,
    /// Clauses defined outside this diagram that reparations may name.
    pub external: Vec<String>,
}

/// One violated invariant, tied to the box it was found on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub box_name: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.box_name, self.message)
    }
}

fn qualified(document_id: &str, parts: &[&str]) -> String {
    let mut all: Vec<&str> = Vec::with_capacity(parts.len() + 1);
    if !document_id.is_empty() {
        all.push(document_id);
    }
    all.extend_from_slice(parts);
    all.join("_")
}

fn leaf_from_row(name: String, row: &ClauseRow) -> DiagramBox {
    let mut b = DiagramBox::leaf(
        &name,
        (!row.subject.is_empty()).then_some(row.subject.as_str()),
        row.modality,
        &row.verb,
        row.object.as_deref().filter(|o| !o.is_empty()),
    );
    b.guard = row.conditions.iter().map(|a| a.to_string()).collect();
    b.time_restriction = row.time.iter().map(|a| a.to_string()).collect();
    b.annotations = row
        .adverbials
        .iter()
        .map(|a| format!("adverbial {a}"))
        .chain(row.notes.iter().map(|a| format!("note {a}")))
        .collect();
    b
}

impl CODiagram {
    pub fn new(document_id: &str) -> Self {
        CODiagram {
            document_id: document_id.to_string(),
            ..Default::default()
        }
    }

    /// Converts a clause table. Returns the diagram and any warnings
    /// (groups whose connectives were mixed and had to be nested).
    ///
    /// Each sentence group gives one root. O/P/F rows become leaves named
    /// `<document>_<sentence>_<row>`; D rows become declarations. When a
    /// group has several leaves they are joined under a refined box named
    /// `<document>_<sentence>`, nesting left-associatively wherever the
    /// connective changes. A name that is already taken (repeated sentence
    /// ids, ids containing `_`) gets a `~2`, `~3`, ... suffix.
    pub fn from_table(table: &ClauseTable) -> Result<(CODiagram, Vec<String>), DiagramError> {
        let mut diagram = CODiagram::new(&table.document_id);
        let mut warnings = Vec::new();
        let mut taken = BTreeSet::new();
        let mut claim = |parts: &[&str]| {
            let mut base = qualified(&table.document_id, parts);
            if base.is_empty() {
                base = "clause".into();
            }
            let mut name = base.clone();
            let mut n = 1;
            while !taken.insert(name.clone()) {
                n += 1;
                name = format!("{base}~{n}");
            }
            name
        };
        for group in &table.groups {
            let sid = group.sentence_id.as_str();
            let mut leaves: Vec<(Option<Refinement>, DiagramBox)> = Vec::new();
            for (k, row) in group.rows.iter().enumerate() {
                if row.verb.trim().is_empty() {
                    return Err(DiagramError::EmptyVerb {
                        sentence_id: sid.to_string(),
                        row: k + 1,
                    });
                }
                if row.modality == Modality::D {
                    diagram.declarations.push(Declaration {
                        subject: row.subject.clone(),
                        verb: row.verb.clone(),
                        object: row.object.clone().filter(|o| !o.is_empty()),
                    });
                    continue;
                }
                let name = claim(&[sid, &(k + 1).to_string()]);
                leaves.push((row.refinement, leaf_from_row(name, row)));
            }
            let mut iter = leaves.into_iter();
            let Some((_, first)) = iter.next() else {
                continue;
            };
            let mut current = first;
            let mut current_conn: Option<Refinement> = None;
            let mut nested = 0;
            for (conn, leaf) in iter {
                let conn = conn.unwrap_or(Refinement::And);
                match (&mut current.content, current_conn) {
                    (Content::Refined { children, .. }, Some(c)) if c == conn => {
                        children.push(leaf)
                    }
                    _ => {
                        if current_conn.is_some() {
                            nested += 1;
                            current.name = claim(&[sid, &format!("g{nested}")]);
                        }
                        current = DiagramBox::refined("", conn, vec![current, leaf]);
                        current_conn = Some(conn);
                    }
                }
            }
            if current_conn.is_some() {
                current.name = claim(&[sid]);
            }
            if nested > 0 {
                warnings.push(format!(
                    "sentence {sid}: mixed connectives nested left-associatively"
                ));
            }
            diagram.roots.push(current);
        }
        Ok((diagram, warnings))
    }

    /// Every box in document (pre-)order.
    pub fn boxes(&self) -> Vec<&DiagramBox> {
        let mut out = Vec::new();
        for r in &self.roots {
            r.walk(&mut out);
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.boxes()
            .iter()
            .filter(|b| b.modality().is_some())
            .count()
    }

    /// Checks the structural invariants; an empty list means the diagram is valid.
    pub fn validate(&self) -> Vec<Finding> {
        let boxes = self.boxes();
        let mut findings = Vec::new();
        let mut seen = BTreeSet::new();
        let mut duplicates = BTreeSet::new();
        for b in &boxes {
            if !seen.insert(b.name.as_str()) {
                duplicates.insert(b.name.as_str());
            }
        }
        for b in &boxes {
            let mut find = |message: &str| {
                findings.push(Finding {
                    box_name: b.name.clone(),
                    message: message.to_string(),
                })
            };
            if b.name.trim().is_empty() {
                find("empty name");
            }
            match &b.content {
                Content::Leaf { modality, action } => {
                    if *modality == Modality::D {
                        find("leaf modality must be O, P or F");
                    }
                    if action.verb.trim().is_empty() {
                        find("empty action verb");
                    }
                }
                Content::Refined { children, .. } => {
                    if children.len() < 2 {
                        find("children < 2");
                    }
                }
            }
            if let Some(Reparation::Clause { name }) = &b.reparation {
                if !seen.contains(name.as_str()) && !self.external.iter().any(|e| e == name) {
                    find("dangling reparation");
                }
            }
        }
        for d in duplicates {
            findings.push(Finding {
                box_name: d.to_string(),
                message: "duplicate name".into(),
            });
        }
        findings
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }

    pub fn from_json(text: &str) -> Result<CODiagram, DiagramError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: raw::Diagram = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = pointer_of(e.path());
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() {
                DiagramError::Json(inner)
            } else {
                DiagramError::Schema {
                    pointer,
                    message: inner.to_string(),
                }
            }
        })?;
        raw.into_model()
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Loosely typed mirror of the JSON schema, so that semantic violations
/// (a `D` leaf, a missing field for the given kind) can be reported with
/// their exact location.
mod raw {
    use serde::Deserialize;

    use super::{Action, Content, DiagramBox, DiagramError, Reparation};
    use crate::modality::{Modality, Refinement};

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Diagram {
        #[serde(default)]
        document_id: String,
        roots: Vec<Box_>,
        #[serde(default)]
        declarations: Vec<super::Declaration>,
        #[serde(default)]
        external: Vec<String>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Box_ {
        name: String,
        #[serde(default)]
        agent: Option<String>,
        #[serde(default)]
        guard: Vec<String>,
        #[serde(default)]
        time_restriction: Vec<String>,
        content: Content_,
        #[serde(default)]
        reparation: Option<Reparation_>,
        #[serde(default)]
        annotations: Vec<String>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Content_ {
        kind: Kind,
        #[serde(default)]
        modality: Option<Modality>,
        #[serde(default)]
        action: Option<Action>,
        #[serde(default)]
        connective: Option<Refinement>,
        #[serde(default)]
        children: Option<Vec<Box_>>,
    }

    #[derive(Deserialize, Clone, Copy)]
    #[serde(rename_all = "lowercase")]
    enum Kind {
        Leaf,
        Refined,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Reparation_ {
        kind: RepKind,
        #[serde(default)]
        name: Option<String>,
    }

    #[derive(Deserialize, Clone, Copy)]
    #[serde(rename_all = "lowercase")]
    enum RepKind {
        Bottom,
        Clause,
    }

    fn schema(pointer: String, message: &str) -> DiagramError {
        DiagramError::Schema {
            pointer,
            message: message.to_string(),
        }
    }

    impl Diagram {
        pub fn into_model(self) -> Result<super::CODiagram, DiagramError> {
            let roots = self
                .roots
                .into_iter()
                .enumerate()
                .map(|(i, b)| b.into_model(format!("/roots/{i}")))
                .collect::<Result<_, _>>()?;
            Ok(super::CODiagram {
                document_id: self.document_id,
                roots,
                declarations: self.declarations,
                external: self.external,
            })
        }
    }

    impl Box_ {
        fn into_model(self, at: String) -> Result<DiagramBox, DiagramError> {
            let c = self.content;
            let content = match c.kind {
                Kind::Leaf => {
                    if c.connective.is_some() || c.children.is_some() {
                        return Err(schema(
                            format!("{at}/content"),
                            "leaf content takes no connective or children",
                        ));
                    }
                    let modality = c
                        .modality
                        .ok_or_else(|| schema(format!("{at}/content/modality"), "missing field"))?;
                    if modality == Modality::D {
                        return Err(schema(
                            format!("{at}/content/modality"),
                            "expected one of O, P, F",
                        ));
                    }
                    let action = c
                        .action
                        .ok_or_else(|| schema(format!("{at}/content/action"), "missing field"))?;
                    Content::Leaf { modality, action }
                }
                Kind::Refined => {
                    if c.modality.is_some() || c.action.is_some() {
                        return Err(schema(
                            format!("{at}/content"),
                            "refined content takes no modality or action",
                        ));
                    }
                    let connective = c.connective.ok_or_else(|| {
                        schema(format!("{at}/content/connective"), "missing field")
                    })?;
                    let children = c
                        .children
                        .ok_or_else(|| schema(format!("{at}/content/children"), "missing field"))?
                        .into_iter()
                        .enumerate()
                        .map(|(i, b)| b.into_model(format!("{at}/content/children/{i}")))
                        .collect::<Result<_, _>>()?;
                    Content::Refined {
                        connective,
                        children,
                    }
                }
            };
            let reparation = match self.reparation {
                None => None,
                Some(r) => Some(match (r.kind, r.name) {
                    (RepKind::Bottom, None) => Reparation::Bottom,
                    (RepKind::Clause, Some(name)) => Reparation::Clause { name },
                    (RepKind::Bottom, Some(_)) => {
                        return Err(schema(
                            format!("{at}/reparation/name"),
                            "bottom reparation takes no name",
                        ))
                    }
                    (RepKind::Clause, None) => {
                        return Err(schema(format!("{at}/reparation/name"), "missing field"))
                    }
                }),
            };
            Ok(DiagramBox {
                name: self.name,
                agent: self.agent,
                guard: self.guard,
                time_restriction: self.time_restriction,
                content,
                reparation,
                annotations: self.annotations,
            })
        }
    }
}
