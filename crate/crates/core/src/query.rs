//! Syntactic queries over C-O Diagram models.
//!
//! Queries are s-expressions. A query is a quantifier over all boxes of a
//! diagram (`exists`, `forall`, `select`) applied to a predicate, or a
//! boolean combination of `exists`/`forall` queries:
//!
//! ```text
//! query := "(" ("exists" | "forall" | "select") pred ")"
//!        | "(" "not" query ")" | "(" ("and" | "or") query+ ")"
//! pred  := "(" atom ")" | "(" "not" pred ")" | "(" ("and" | "or") pred+ ")"
//! atom  := isObl | isPerm | isForb | isLeaf | isRefined [AND|OR|SEQ]
//!        | hasReparation | hasTimeRestriction | hasGuard
//!        | agentIs STRING | verbIs STRING | nameIs STRING
//! ```
//!
//! `select` yields the names of matching boxes in document order and may
//! only appear at the top. Modality atoms are false on refined boxes.

use std::fmt;

use thiserror::Error;

use crate::codiag::{CODiagram, Content, DiagramBox};
use crate::modality::{Modality, Refinement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown atom `{name}` at column {column}")]
    UnknownAtom { column: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    IsObl,
    IsPerm,
    IsForb,
    IsLeaf,
    /// Refined box, optionally with a given connective.
    IsRefined(Option<Refinement>),
    AgentIs(String),
    VerbIs(String),
    HasReparation,
    HasTimeRestriction,
    HasGuard,
    NameIs(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    Atom(Atom),
    Not(Box<Pred>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Exists(Pred),
    Forall(Pred),
    Select(Pred),
    Not(Box<Query>),
    And(Vec<Query>),
    Or(Vec<Query>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryResult {
    Bool(bool),
    Names(Vec<String>),
}

impl fmt::Display for QueryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryResult::Bool(b) => writeln!(f, "{b}"),
            QueryResult::Names(names) => names.iter().try_for_each(|n| writeln!(f, "{n}")),
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::IsObl => write!(f, "(isObl)"),
            Atom::IsPerm => write!(f, "(isPerm)"),
            Atom::IsForb => write!(f, "(isForb)"),
            Atom::IsLeaf => write!(f, "(isLeaf)"),
            Atom::IsRefined(None) => write!(f, "(isRefined)"),
            Atom::IsRefined(Some(c)) => write!(f, "(isRefined {c})"),
            Atom::AgentIs(s) => write!(f, "(agentIs {})", quote(s)),
            Atom::VerbIs(s) => write!(f, "(verbIs {})", quote(s)),
            Atom::HasReparation => write!(f, "(hasReparation)"),
            Atom::HasTimeRestriction => write!(f, "(hasTimeRestriction)"),
            Atom::HasGuard => write!(f, "(hasGuard)"),
            Atom::NameIs(s) => write!(f, "(nameIs {})", quote(s)),
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, op: &str, items: &[T]) -> fmt::Result {
    write!(f, "({op}")?;
    for i in items {
        write!(f, " {i}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Atom(a) => a.fmt(f),
            Pred::Not(p) => write!(f, "(not {p})"),
            Pred::And(ps) => write_list(f, "and", ps),
            Pred::Or(ps) => write_list(f, "or", ps),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Exists(p) => write!(f, "(exists {p})"),
            Query::Forall(p) => write!(f, "(forall {p})"),
            Query::Select(p) => write!(f, "(select {p})"),
            Query::Not(q) => write!(f, "(not {q})"),
            Query::And(qs) => write_list(f, "and", qs),
            Query::Or(qs) => write_list(f, "or", qs),
        }
    }
}

// ---- reader ----

#[derive(Debug)]
enum Sexp {
    List(Vec<Sexp>, usize),
    Symbol(String, usize),
    Str(String, usize),
}

impl Sexp {
    fn column(&self) -> usize {
        match self {
            Sexp::List(_, c) | Sexp::Symbol(_, c) | Sexp::Str(_, c) => *c,
        }
    }
}

fn syntax(column: usize, message: impl Into<String>) -> QueryError {
    QueryError::Syntax {
        column,
        message: message.into(),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::iter::Enumerate<std::str::Chars<'a>>>,
    len: usize,
}

impl Reader<'_> {
    fn skip_ws(&mut self) {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn read(&mut self) -> Result<Sexp, QueryError> {
        self.skip_ws();
        let Some((i, c)) = self.chars.next() else {
            return Err(syntax(self.len + 1, "unexpected end of input"));
        };
        let col = i + 1;
        match c {
            '(' => {
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek() {
                        None => {
                            return Err(syntax(
                                self.len + 1,
                                format!("unclosed `(` opened at column {col}"),
                            ))
                        }
                        Some((_, ')')) => {
                            self.chars.next();
                            return Ok(Sexp::List(items, col));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            ')' => Err(syntax(col, "unexpected `)`")),
            '"' => {
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        None => {
                            return Err(syntax(
                                self.len + 1,
                                format!("unterminated string opened at column {col}"),
                            ))
                        }
                        Some((_, '"')) => return Ok(Sexp::Str(s, col)),
                        Some((j, '\\')) => match self.chars.next() {
                            Some((_, e @ ('"' | '\\'))) => s.push(e),
                            _ => return Err(syntax(j + 1, "invalid escape")),
                        },
                        Some((_, ch)) => s.push(ch),
                    }
                }
            }
            _ => {
                let mut s = String::from(c);
                while let Some((_, ch)) = self
                    .chars
                    .next_if(|(_, ch)| !ch.is_whitespace() && !"()\"".contains(*ch))
                {
                    s.push(ch);
                }
                Ok(Sexp::Symbol(s, col))
            }
        }
    }
}

fn head_of(items: &[Sexp], col: usize) -> Result<(&str, usize), QueryError> {
    match items.first() {
        Some(Sexp::Symbol(s, c)) => Ok((s.as_str(), *c)),
        Some(other) => Err(syntax(other.column(), "expected an operator name")),
        None => Err(syntax(col, "empty list")),
    }
}

fn string_arg(items: &[Sexp], name: &str, col: usize) -> Result<String, QueryError> {
    match items {
        [_, Sexp::Str(s, _)] => Ok(s.clone()),
        [_, other] => Err(syntax(
            other.column(),
            format!("`{name}` takes a quoted string"),
        )),
        _ => Err(syntax(
            col,
            format!("`{name}` takes exactly one string argument"),
        )),
    }
}

fn no_args(items: &[Sexp], name: &str) -> Result<(), QueryError> {
    match items.get(1) {
        None => Ok(()),
        Some(extra) => Err(syntax(
            extra.column(),
            format!("`{name}` takes no arguments"),
        )),
    }
}

fn to_pred(sexp: &Sexp) -> Result<Pred, QueryError> {
    let Sexp::List(items, col) = sexp else {
        return Err(syntax(sexp.column(), "expected a parenthesized predicate"));
    };
    let (op, op_col) = head_of(items, *col)?;
    let rest = &items[1..];
    let many = |rest: &[Sexp]| -> Result<Vec<Pred>, QueryError> {
        if rest.is_empty() {
            return Err(syntax(*col, format!("`{op}` needs at least one operand")));
        }
        rest.iter().map(to_pred).collect()
    };
    let atom = match op {
        "not" => {
            return match rest {
                [p] => Ok(Pred::Not(Box::new(to_pred(p)?))),
                _ => Err(syntax(*col, "`not` takes exactly one operand")),
            }
        }
        "and" => return Ok(Pred::And(many(rest)?)),
        "or" => return Ok(Pred::Or(many(rest)?)),
        "exists" | "forall" | "select" => {
            return Err(syntax(
                op_col,
                format!("`{op}` cannot appear inside a predicate"),
            ));
        }
        "isObl" => Atom::IsObl,
        "isPerm" => Atom::IsPerm,
        "isForb" => Atom::IsForb,
        "isLeaf" => Atom::IsLeaf,
        "hasReparation" => Atom::HasReparation,
        "hasTimeRestriction" => Atom::HasTimeRestriction,
        "hasGuard" => Atom::HasGuard,
        "isRefined" => match rest {
            [] => Atom::IsRefined(None),
            [Sexp::Symbol(s, c) | Sexp::Str(s, c)] => {
                let conn = s.parse::<Refinement>().map_err(|_| {
                    syntax(
                        *c,
                        format!("unknown connective `{s}` (expected AND, OR or SEQ)"),
                    )
                })?;
                Atom::IsRefined(Some(conn))
            }
            _ => return Err(syntax(*col, "`isRefined` takes at most one connective")),
        },
        "agentIs" => Atom::AgentIs(string_arg(items, op, *col)?),
        "verbIs" => Atom::VerbIs(string_arg(items, op, *col)?),
        "nameIs" => Atom::NameIs(string_arg(items, op, *col)?),
        other => {
            return Err(QueryError::UnknownAtom {
                column: op_col,
                name: other.to_string(),
            })
        }
    };
    if matches!(
        atom,
        Atom::IsObl
            | Atom::IsPerm
            | Atom::IsForb
            | Atom::IsLeaf
            | Atom::HasReparation
            | Atom::HasTimeRestriction
            | Atom::HasGuard
    ) {
        no_args(items, op)?;
    }
    Ok(Pred::Atom(atom))
}

fn to_query(sexp: &Sexp, top: bool) -> Result<Query, QueryError> {
    let Sexp::List(items, col) = sexp else {
        return Err(syntax(sexp.column(), "expected a parenthesized query"));
    };
    let (op, op_col) = head_of(items, *col)?;
    let rest = &items[1..];
    let one_pred = || match rest {
        [p] => to_pred(p),
        _ => Err(syntax(*col, format!("`{op}` takes exactly one predicate"))),
    };
    let many = || -> Result<Vec<Query>, QueryError> {
        if rest.is_empty() {
            return Err(syntax(*col, format!("`{op}` needs at least one operand")));
        }
        rest.iter().map(|q| to_query(q, false)).collect()
    };
    match op {
        "exists" => Ok(Query::Exists(one_pred()?)),
        "forall" => Ok(Query::Forall(one_pred()?)),
        "select" if top => Ok(Query::Select(one_pred()?)),
        "select" => Err(syntax(op_col, "`select` is only allowed at the top level")),
        "not" => match rest {
            [q] => Ok(Query::Not(Box::new(to_query(q, false)?))),
            _ => Err(syntax(*col, "`not` takes exactly one operand")),
        },
        "and" => Ok(Query::And(many()?)),
        "or" => Ok(Query::Or(many()?)),
        _ => {
            // report unknown names as such, otherwise point out the missing quantifier
            to_pred(sexp)?;
            Err(syntax(
                op_col,
                "expected `exists`, `forall` or `select` around the predicate",
            ))
        }
    }
}

/// Parses and statically checks a query.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut reader = Reader {
        chars: text.chars().enumerate().peekable(),
        len: text.chars().count(),
    };
    let sexp = reader.read()?;
    reader.skip_ws();
    if let Some((i, _)) = reader.chars.next() {
        return Err(syntax(i + 1, "trailing input after the query"));
    }
    to_query(&sexp, true)
}

// ---- evaluation ----

fn same_text(a: &str, b: &str) -> bool {
    let norm = |s: &str| {
        s.split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_lowercase()
    };
    norm(a) == norm(b)
}

impl Atom {
    pub fn holds(&self, b: &DiagramBox) -> bool {
        match self {
            Atom::IsObl => b.modality() == Some(Modality::O),
            Atom::IsPerm => b.modality() == Some(Modality::P),
            Atom::IsForb => b.modality() == Some(Modality::F),
            Atom::IsLeaf => matches!(b.content, Content::Leaf { .. }),
            Atom::IsRefined(want) => match &b.content {
                Content::Refined { connective, .. } => want.is_none_or(|w| w == *connective),
                Content::Leaf { .. } => false,
            },
            Atom::AgentIs(s) => b.agent.as_deref().is_some_and(|a| same_text(a, s)),
            Atom::VerbIs(s) => match &b.content {
                Content::Leaf { action, .. } => same_text(&action.verb, s),
                Content::Refined { .. } => false,
            },
            Atom::HasReparation => b.reparation.is_some(),
            Atom::HasTimeRestriction => !b.time_restriction.is_empty(),
            Atom::HasGuard => !b.guard.is_empty(),
            Atom::NameIs(s) => b.name == *s,
        }
    }
}

impl Pred {
    pub fn holds(&self, b: &DiagramBox) -> bool {
        match self {
            Pred::Atom(a) => a.holds(b),
            Pred::Not(p) => !p.holds(b),
            Pred::And(ps) => ps.iter().all(|p| p.holds(b)),
            Pred::Or(ps) => ps.iter().any(|p| p.holds(b)),
        }
    }
}

fn truth(q: &Query, boxes: &[&DiagramBox]) -> bool {
    match q {
        Query::Exists(p) => boxes.iter().any(|b| p.holds(b)),
        Query::Forall(p) => boxes.iter().all(|b| p.holds(b)),
        Query::Select(p) => boxes.iter().any(|b| p.holds(b)),
        Query::Not(q) => !truth(q, boxes),
        Query::And(qs) => qs.iter().all(|q| truth(q, boxes)),
        Query::Or(qs) => qs.iter().any(|q| truth(q, boxes)),
    }
}

/// Evaluates a query against every box of the diagram.
pub fn eval_query(query: &Query, diagram: &CODiagram) -> QueryResult {
    let boxes = diagram.boxes();
    match query {
        Query::Select(p) => QueryResult::Names(
            boxes
                .iter()
                .filter(|b| p.holds(b))
                .map(|b| b.name.clone())
                .collect(),
        ),
        q => QueryResult::Bool(truth(q, &boxes)),
    }
}
