//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

use normex::codiag::{Content, Declaration, Reparation};
use normex::query::{Atom, Pred, Query};
use normex::{
    Attachment, Attributed, CODiagram, ClauseRow, ClauseTable, DiagramBox, Modality, Refinement,
    SentenceGroup,
};
use proptest::prelude::*;

pub const GOLDEN: &str = include_str!("../data/golden.conllu");
pub const GOLDEN_UD: &str = include_str!("../data/golden_ud.conllu");
pub const GOLDEN_GOLD: &str = include_str!("../data/golden_gold.tsv");
pub const SLA_MODEL: &str = include_str!("../data/sla_model.json");

/// Cell text, including characters the TSV format has to escape.
pub fn text() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 ,.'|:#()\\\\\t\n-]{0,14}".prop_map(|s| s.trim().to_string())
}

pub fn word() -> impl Strategy<Value = String> {
    "[a-z][a-z_]{0,7}"
}

pub fn modality() -> impl Strategy<Value = Modality> {
    prop::sample::select(Modality::ALL.to_vec())
}

pub fn deontic() -> impl Strategy<Value = Modality> {
    prop::sample::select(vec![Modality::O, Modality::P, Modality::F])
}

pub fn connective() -> impl Strategy<Value = Refinement> {
    prop::sample::select(vec![Refinement::And, Refinement::Or, Refinement::Seq])
}

fn attributed() -> impl Strategy<Value = Attributed> {
    (
        prop::sample::select(vec![Attachment::S, Attachment::V, Attachment::O]),
        text(),
    )
        .prop_map(|(a, t)| Attributed::new(a, t))
}

fn phrases() -> impl Strategy<Value = Vec<Attributed>> {
    prop::collection::vec(attributed(), 0..3)
}

/// A row; `verb_required` keeps the Verb cell non-empty.
pub fn row(verb_required: bool) -> impl Strategy<Value = ClauseRow> {
    let verb = if verb_required {
        "[a-z][a-z \\[\\]]{0,10}[a-z\\]]".prop_map(|s| s).boxed()
    } else {
        text().boxed()
    };
    (
        (
            connective(),
            modality(),
            text(),
            verb,
            prop::option::of(text().prop_filter("non-empty", |s| !s.is_empty())),
        ),
        (phrases(), phrases(), phrases(), phrases()),
        prop::option::of(text()),
    )
        .prop_map(
            |(
                (refinement, modality, subject, verb, object),
                (time, adverbials, conditions, notes),
                diagnostic,
            )| {
                ClauseRow {
                    refinement: Some(refinement),
                    modality,
                    subject,
                    verb,
                    object,
                    time,
                    adverbials,
                    conditions,
                    notes,
                    diagnostic,
                }
            },
        )
}

/// A table that satisfies the refinement invariant. Sentence ids may repeat
/// and may contain `_`.
pub fn table(verb_required: bool) -> impl Strategy<Value = ClauseTable> {
    let group = (
        prop::sample::select(vec!["1", "2", "3", "1_1", "s", "10"]),
        text(),
        prop::collection::vec(row(verb_required), 0..5),
    )
        .prop_map(|(id, text, mut rows)| {
            if let Some(first) = rows.first_mut() {
                first.refinement = None;
            }
            SentenceGroup {
                sentence_id: id.to_string(),
                text,
                rows,
            }
        });
    (
        prop::sample::select(vec!["", "doc", "tos"]),
        prop::collection::vec(group, 0..6),
    )
        .prop_map(|(doc, groups)| ClauseTable {
            document_id: doc.to_string(),
            groups,
        })
}

pub const AGENTS: [&str; 4] = ["company", "renter", "User", "person"];
pub const VERBS: [&str; 4] = ["respond", "pay", "use", "[is] delivered [to]"];

#[derive(Debug, Clone)]
enum Shape {
    Leaf(Modality, usize, Option<String>),
    Refined(Refinement, Vec<Extras>),
}

#[derive(Debug, Clone)]
struct Extras {
    shape: Box<Shape>,
    agent: Option<usize>,
    guards: usize,
    times: usize,
    /// None: no reparation; Some(None): ⊥; Some(Some(k)): the k-th box.
    reparation: Option<Option<usize>>,
}

fn extras(shape: impl Strategy<Value = Shape>) -> impl Strategy<Value = Extras> {
    (
        shape,
        prop::option::of(0..AGENTS.len()),
        0..3usize,
        0..3usize,
        prop::option::of(prop::option::of(0..64usize)),
    )
        .prop_map(|(shape, agent, guards, times, reparation)| Extras {
            shape: Box::new(shape),
            agent,
            guards,
            times,
            reparation,
        })
}

fn shaped_box() -> impl Strategy<Value = Extras> {
    let leaf = (deontic(), 0..VERBS.len(), prop::option::of(word()))
        .prop_map(|(m, v, o)| Shape::Leaf(m, v, o));
    extras(leaf).prop_recursive(3, 16, 4, |inner| {
        extras(
            (connective(), prop::collection::vec(inner, 2..4))
                .prop_map(|(c, ch)| Shape::Refined(c, ch)),
        )
    })
}

fn build(e: &Extras, counter: &mut usize) -> DiagramBox {
    let name = format!("b{counter}");
    *counter += 1;
    let mut b = match e.shape.as_ref() {
        Shape::Leaf(m, v, o) => DiagramBox::leaf(&name, None, *m, VERBS[*v], o.as_deref()),
        Shape::Refined(c, children) => {
            let children = children.iter().map(|ch| build(ch, counter)).collect();
            DiagramBox::refined(&name, *c, children)
        }
    };
    b.agent = e.agent.map(|a| AGENTS[a].to_string());
    b.guard = (0..e.guards).map(|g| format!("isDone(g{g})")).collect();
    b.time_restriction = (0..e.times)
        .map(|t| format!("t < {}", 4 * (t + 1)))
        .collect();
    b
}

fn attach_reparations(
    b: &mut DiagramBox,
    plans: &mut std::slice::Iter<'_, Option<Option<usize>>>,
    total: usize,
) {
    b.reparation = plans.next().copied().flatten().map(|r| match r {
        None => Reparation::Bottom,
        Some(k) => Reparation::Clause {
            name: format!("b{}", k % total),
        },
    });
    if let Content::Refined { children, .. } = &mut b.content {
        for c in children {
            attach_reparations(c, plans, total);
        }
    }
}

fn plans(e: &Extras, out: &mut Vec<Option<Option<usize>>>) {
    out.push(e.reparation);
    if let Shape::Refined(_, children) = e.shape.as_ref() {
        for c in children {
            plans(c, out);
        }
    }
}

/// A valid diagram: unique names, resolvable reparations, refined boxes with ≥ 2 children.
pub fn diagram() -> impl Strategy<Value = CODiagram> {
    (
        prop::collection::vec(shaped_box(), 0..4),
        prop::collection::vec((word(), word(), prop::option::of(word())), 0..3),
        prop::sample::select(vec!["", "d", "figure"]),
    )
        .prop_map(|(roots, decls, doc)| {
            let mut counter = 0;
            let mut built: Vec<DiagramBox> = roots.iter().map(|e| build(e, &mut counter)).collect();
            let mut all_plans = Vec::new();
            for e in &roots {
                plans(e, &mut all_plans);
            }
            let mut it = all_plans.iter();
            for b in &mut built {
                attach_reparations(b, &mut it, counter.max(1));
            }
            CODiagram {
                document_id: doc.to_string(),
                roots: built,
                declarations: decls
                    .into_iter()
                    .map(|(subject, verb, object)| Declaration {
                        subject,
                        verb,
                        object,
                    })
                    .collect(),
                external: Vec::new(),
            }
        })
}

pub fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        Just(Atom::IsObl),
        Just(Atom::IsPerm),
        Just(Atom::IsForb),
        Just(Atom::IsLeaf),
        prop::option::of(connective()).prop_map(Atom::IsRefined),
        prop::sample::select(AGENTS.to_vec()).prop_map(|a| Atom::AgentIs(a.to_string())),
        prop::sample::select(VERBS.to_vec()).prop_map(|v| Atom::VerbIs(v.to_string())),
        Just(Atom::HasReparation),
        Just(Atom::HasTimeRestriction),
        Just(Atom::HasGuard),
        (0..8usize).prop_map(|k| Atom::NameIs(format!("b{k}"))),
    ]
}

pub fn pred() -> impl Strategy<Value = Pred> {
    atom()
        .prop_map(Pred::Atom)
        .prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|p| Pred::Not(Box::new(p))),
                prop::collection::vec(inner.clone(), 1..4).prop_map(Pred::And),
                prop::collection::vec(inner, 1..4).prop_map(Pred::Or),
            ]
        })
}

pub fn query() -> impl Strategy<Value = Query> {
    let quantified = pred()
        .prop_flat_map(|p| prop_oneof![Just(Query::Exists(p.clone())), Just(Query::Forall(p))]);
    let boolean = quantified.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|q| Query::Not(Box::new(q))),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Query::And),
            prop::collection::vec(inner, 1..3).prop_map(Query::Or),
        ]
    });
    prop_oneof![boolean, pred().prop_map(Query::Select)]
}

// ---- oracles, written against the JSON-level data and independent of the library walkers ----

/// Boxes in document order, by explicit stack traversal.
pub fn flat_boxes(d: &CODiagram) -> Vec<&DiagramBox> {
    let mut out = Vec::new();
    let mut stack: Vec<&DiagramBox> = d.roots.iter().rev().collect();
    while let Some(b) = stack.pop() {
        out.push(b);
        if let Content::Refined { children, .. } = &b.content {
            stack.extend(children.iter().rev());
        }
    }
    out
}

fn oracle_atom(a: &Atom, b: &DiagramBox) -> bool {
    let leaf = match &b.content {
        Content::Leaf { modality, action } => Some((*modality, action.verb.as_str())),
        Content::Refined { .. } => None,
    };
    let conn = match &b.content {
        Content::Refined { connective, .. } => Some(*connective),
        Content::Leaf { .. } => None,
    };
    match a {
        Atom::IsObl => leaf.map(|l| l.0) == Some(Modality::O),
        Atom::IsPerm => leaf.map(|l| l.0) == Some(Modality::P),
        Atom::IsForb => leaf.map(|l| l.0) == Some(Modality::F),
        Atom::IsLeaf => leaf.is_some(),
        Atom::IsRefined(None) => conn.is_some(),
        Atom::IsRefined(Some(c)) => conn == Some(*c),
        Atom::AgentIs(s) => b.agent.as_ref().map(|x| x.to_lowercase()) == Some(s.to_lowercase()),
        Atom::VerbIs(s) => leaf.map(|l| l.1.to_lowercase()) == Some(s.to_lowercase()),
        Atom::HasReparation => b.reparation.is_some(),
        Atom::HasTimeRestriction => !b.time_restriction.is_empty(),
        Atom::HasGuard => !b.guard.is_empty(),
        Atom::NameIs(s) => b.name == *s,
    }
}

pub fn oracle_pred(p: &Pred, b: &DiagramBox) -> bool {
    match p {
        Pred::Atom(a) => oracle_atom(a, b),
        Pred::Not(p) => !oracle_pred(p, b),
        Pred::And(ps) => ps.iter().all(|p| oracle_pred(p, b)),
        Pred::Or(ps) => ps.iter().any(|p| oracle_pred(p, b)),
    }
}

/// Names selected by `p`, by brute force.
pub fn oracle_select(p: &Pred, d: &CODiagram) -> Vec<String> {
    flat_boxes(d)
        .into_iter()
        .filter(|b| oracle_pred(p, b))
        .map(|b| b.name.clone())
        .collect()
}
