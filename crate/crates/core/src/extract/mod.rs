//! Clause extraction from label-mapped dependency trees.
//!
//! The rule layer reads arguments and modifiers straight off the Stanford
//! relations. The heuristic layer, switched by
//! [`ExtractionConfig::heuristics_enabled`], adds the extended modal
//! keywords, temporal and conditional routing, PP-attachment repair,
//! numeric conditions, prepositional and indirect objects, and the
//! introductory-clause skip.
//!
//! Per sentence the pipeline runs: main predicate, coordination frames
//! (verbs, then subjects, then objects), passive conversion, modality,
//! field population with modifier routing, and normalization with pronoun
//! rewriting.

mod normalize;

use std::collections::BTreeSet;

pub use normalize::{is_pronoun, normalize_phrase, render_raw, resolve_anaphora};

use crate::config::ExtractionConfig;
use crate::conllu::{DependencyTree, Token};
use crate::modality::{classify_modality, Modality, Refinement};
use crate::table::{Attachment, Attributed, ClauseRow};

const SUBJECT_LABELS: [&str; 4] = ["nsubj", "nsubjpass", "csubj", "csubjpass"];
const AUX_LABELS: [&str; 4] = ["aux", "auxpass", "neg", "cop"];
const PP_LABELS: [&str; 3] = ["prep", "tmod", "npadvmod"];

/// One argument position of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    /// The dependent of the predicate that fills the position.
    pub dependent: usize,
    /// The conjunct chosen for this frame (equal to `dependent` for the first conjunct).
    pub head: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerbForm {
    /// Lemma of the predicate.
    Base,
    /// Agentless passive, rendered `[is] <participle>`.
    Participle,
}

/// A sub-predicate frame: one predicate with one choice of coordinated
/// subject and object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub predicate: usize,
    pub subject: Option<Slot>,
    pub object: Option<Slot>,
    /// The `by` phrase of a passive predicate.
    pub agent: Option<Slot>,
    pub passive: bool,
    pub verb_form: VerbForm,
    /// Preposition folded into the verb when a PP serves as the object.
    pub verb_prep: Option<String>,
    /// Dependents visible to this frame: the predicate's own plus those
    /// distributed from the first conjunct of a verb coordination.
    pub dependents: Vec<usize>,
    /// Sequencing adverb ("then") consumed by the connective.
    pub seq_marker: Option<usize>,
}

/// Predicate chosen for a sentence, with an optional skipped introduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct MainPredicate {
    predicate: usize,
    intro: Option<usize>,
}

fn looks_predicative(tree: &DependencyTree, t: &Token) -> bool {
    if t.is_punct() {
        return false;
    }
    matches!(t.upos.as_str(), "VERB" | "AUX")
        || t.xpos.as_deref().is_some_and(|x| x.starts_with("VB"))
        || tree.children(t.index).any(|c| {
            matches!(
                c.deprel.as_str(),
                "cop" | "nsubj" | "nsubjpass" | "csubj" | "aux" | "auxpass"
            )
        })
}

fn main_predicate(
    tree: &DependencyTree,
    config: Option<&ExtractionConfig>,
) -> Option<MainPredicate> {
    let root = tree.root()?;
    if let Some(cfg) = config.filter(|c| c.heuristics_enabled) {
        if ExtractionConfig::listed(&cfg.introductory_predicates, &root.lemma_lower()) {
            if let Some(comp) = tree.first_child_with(root.index, "ccomp") {
                return Some(MainPredicate {
                    predicate: comp.index,
                    intro: Some(root.index),
                });
            }
        }
    }
    looks_predicative(tree, root).then_some(MainPredicate {
        predicate: root.index,
        intro: None,
    })
}

/// All conjuncts of `head` (including itself), in sentence order.
fn conjunct_chain(tree: &DependencyTree, head: usize) -> Vec<usize> {
    let mut chain = vec![head];
    let mut stack = vec![head];
    while let Some(i) = stack.pop() {
        for c in tree.children_with(i, "conj") {
            chain.push(c.index);
            stack.push(c.index);
        }
    }
    chain.sort_unstable();
    chain
}

fn cc_connective(lemma: &str) -> Refinement {
    match lemma {
        "or" | "nor" | "and/or" => Refinement::Or,
        _ => Refinement::And,
    }
}

/// Connective joining `chain[k]` to the preceding conjuncts.
fn connective(tree: &DependencyTree, chain: &[usize], k: usize) -> Refinement {
    let cur = chain[k];
    let prev = chain[k - 1];
    // coordinator attached to the conjunct itself, in front of it
    if let Some(cc) = tree.children_with(cur, "cc").find(|c| c.index < cur) {
        return cc_connective(&cc.lemma_lower());
    }
    // coordinator attached to an earlier conjunct, between the two
    for &member in &chain[..k] {
        if let Some(cc) = tree
            .children_with(member, "cc")
            .filter(|c| c.index > prev && c.index < cur)
            .last()
        {
            return cc_connective(&cc.lemma_lower());
        }
    }
    // list punctuation: the chain's coordinator applies throughout
    chain
        .iter()
        .flat_map(|&m| tree.children_with(m, "cc"))
        .next()
        .map(|cc| cc_connective(&cc.lemma_lower()))
        .unwrap_or(Refinement::And)
}

fn has_label_in(tree: &DependencyTree, deps: &[usize], labels: &[&str]) -> bool {
    deps.iter()
        .any(|&d| labels.contains(&tree.token(d).deprel.as_str()))
}

fn first_with(tree: &DependencyTree, deps: &[usize], labels: &[&str]) -> Option<usize> {
    deps.iter()
        .copied()
        .find(|&d| labels.contains(&tree.token(d).deprel.as_str()))
}

pub(crate) fn pp_preposition(tree: &DependencyTree, index: usize) -> Option<String> {
    let t = tree.token(index);
    if let Some(p) = t.deprel.strip_prefix("prep:") {
        return Some(p.to_string());
    }
    let mut parts: Vec<&Token> = tree.children_with(index, "case").collect();
    parts.sort_by_key(|c| c.index);
    (!parts.is_empty()).then(|| {
        parts
            .iter()
            .map(|c| c.surface.to_lowercase())
            .collect::<Vec<_>>()
            .join("_")
    })
}

fn is_pp(token: &Token) -> bool {
    token.deprel.starts_with("prep:") || PP_LABELS.contains(&token.deprel.as_str())
}

/// True when a PP (or bare temporal NP) reads as a time expression.
fn is_temporal(tree: &DependencyTree, index: usize, config: &ExtractionConfig) -> bool {
    let t = tree.token(index);
    if t.deprel == "tmod" {
        return true;
    }
    if let Some(p) = pp_preposition(tree, index) {
        if ExtractionConfig::listed(&config.temporal_prepositions, &p) {
            return true;
        }
    }
    ExtractionConfig::listed(&config.time_nouns, &t.lemma_lower())
}

fn seq_marker(tree: &DependencyTree, conjunct: usize, markers: &[String]) -> Option<usize> {
    tree.children_with(conjunct, "advmod")
        .find(|a| ExtractionConfig::listed(markers, &a.lemma_lower()))
        .map(|a| a.index)
}

/// Builds every frame of the sentence, each with the connective that joins
/// it to the previous one (`None` for the first).
fn frames_for(
    tree: &DependencyTree,
    predicate: usize,
    config: Option<&ExtractionConfig>,
) -> Vec<(Frame, Option<Refinement>)> {
    let defaults;
    let cfg = match config {
        Some(c) => c,
        None => {
            defaults = ExtractionConfig::rules_only();
            &defaults
        }
    };
    let heuristics = config.is_some_and(|c| c.heuristics_enabled);
    let verbs = conjunct_chain(tree, predicate);
    let last_verb = *verbs.last().unwrap_or(&predicate);
    let mut out = Vec::new();

    for (k, &verb) in verbs.iter().enumerate() {
        let mut deps: Vec<usize> = tree
            .children(verb)
            .map(|c| c.index)
            .filter(|i| !verbs.contains(i))
            .collect();
        if verb != predicate {
            let own: Vec<usize> = deps.clone();
            let own_subject = has_label_in(tree, &own, &SUBJECT_LABELS);
            let own_aux = has_label_in(tree, &own, &AUX_LABELS);
            let own_object = has_label_in(tree, &own, &["dobj"]);
            for c in tree.children(predicate) {
                if verbs.contains(&c.index) || c.deprel == "cc" || c.deprel == "mark" {
                    continue;
                }
                if !(c.index < predicate || c.index > last_verb) {
                    continue;
                }
                let label = c.deprel.as_str();
                if (own_subject && SUBJECT_LABELS.contains(&label))
                    || (own_aux && AUX_LABELS.contains(&label))
                    || (own_object && label == "dobj")
                {
                    continue;
                }
                deps.push(c.index);
            }
            deps.sort_unstable();
        }

        let passive = has_label_in(tree, &deps, &["auxpass", "nsubjpass", "csubjpass"]);
        let subject = first_with(tree, &deps, &SUBJECT_LABELS);
        let agent = if passive {
            deps.iter()
                .copied()
                .find(|&d| matches!(tree.token(d).deprel.as_str(), "agent" | "prep:by"))
        } else {
            None
        };
        let mut object = first_with(tree, &deps, &["dobj"]);
        let mut verb_prep = None;
        if heuristics && object.is_none() && agent.is_none() {
            if let Some(pp) = deps.iter().copied().find(|&d| {
                let t = tree.token(d);
                t.deprel.starts_with("prep:") && !is_temporal(tree, d, cfg)
            }) {
                object = Some(pp);
                verb_prep = pp_preposition(tree, pp);
            }
        }

        let (seq, verb_conn) = if k == 0 {
            (None, None)
        } else {
            match seq_marker(tree, verb, &cfg.sequence_markers) {
                Some(m) => (Some(m), Some(Refinement::Seq)),
                None => (None, Some(connective(tree, &verbs, k))),
            }
        };

        let subjects = subject.map(|s| conjunct_chain(tree, s)).unwrap_or_default();
        let second = if agent.is_some() { agent } else { object };
        let seconds = second.map(|o| conjunct_chain(tree, o)).unwrap_or_default();
        let subject_choices: Vec<Option<usize>> = if subjects.is_empty() {
            vec![None]
        } else {
            subjects.iter().map(|&s| Some(s)).collect()
        };
        let second_choices: Vec<Option<usize>> = if seconds.is_empty() {
            vec![None]
        } else {
            seconds.iter().map(|&o| Some(o)).collect()
        };

        for (i, s) in subject_choices.iter().enumerate() {
            for (j, o) in second_choices.iter().enumerate() {
                let conn = if j > 0 {
                    Some(connective(tree, &seconds, j))
                } else if i > 0 {
                    Some(connective(tree, &subjects, i))
                } else {
                    verb_conn
                };
                let second_slot = o.map(|head| Slot {
                    dependent: second.unwrap_or(head),
                    head,
                });
                let frame = Frame {
                    predicate: verb,
                    subject: s.map(|head| Slot {
                        dependent: subject.unwrap_or(head),
                        head,
                    }),
                    object: if agent.is_some() { None } else { second_slot },
                    agent: if agent.is_some() { second_slot } else { None },
                    passive,
                    verb_form: VerbForm::Base,
                    verb_prep: verb_prep.clone(),
                    dependents: deps.clone(),
                    seq_marker: seq,
                };
                out.push((frame, conn));
            }
        }
    }
    out
}

/// Splits a tree into one frame per conjunct combination of the
/// coordinated verbs, subjects and objects. Only the rule layer is used.
pub fn split_coordinations(tree: &DependencyTree) -> Vec<(Frame, Option<Refinement>)> {
    match main_predicate(tree, None) {
        Some(main) => frames_for(tree, main.predicate, None),
        None => Vec::new(),
    }
}

/// Rewrites a passive frame into active form.
///
/// With a `by` agent the agent becomes the subject and the passive subject
/// the object. Without one the subject stays and the verb is rendered as
/// `[is] <participle>`.
pub fn convert_passive(frame: &Frame) -> Frame {
    let mut out = frame.clone();
    if !frame.passive {
        return out;
    }
    out.passive = false;
    match frame.agent {
        Some(agent) => {
            out.object = frame.subject;
            out.subject = Some(agent);
            out.agent = None;
            out.verb_form = VerbForm::Base;
        }
        None => out.verb_form = VerbForm::Participle,
    }
    out
}

/// Accumulates modifier phrases for one row.
#[derive(Default)]
struct Fields {
    time: Vec<Attributed>,
    adverbials: Vec<Attributed>,
    conditions: Vec<Attributed>,
    notes: Vec<Attributed>,
}

/// Routes the dependents of a subject or object head, returning the ones
/// that must not appear in the normalized phrase.
fn route_np(
    tree: &DependencyTree,
    head: usize,
    attach: Attachment,
    config: &ExtractionConfig,
    fields: &mut Fields,
) -> BTreeSet<usize> {
    let heuristics = config.heuristics_enabled;
    let mut skip = BTreeSet::new();
    let none = BTreeSet::new();
    for child in tree.children(head) {
        let label = child.deprel.as_str();
        let text = || render_raw(tree, child.index, &none, config);
        match label {
            "conj" | "cc" | "preconj" => {
                skip.insert(child.index);
            }
            "det" | "predet" | "case" | "punct" | "possessive" | "poss" | "amod" | "nn"
            | "compound" | "quantmod" | "mwe" | "prt" => {}
            "num" | "number" if heuristics => {
                fields.conditions.push(Attributed::new(attach, text()));
                skip.insert(child.index);
            }
            "num" | "number" => {}
            "advmod"
                if heuristics
                    && ExtractionConfig::listed(
                        &config.irrelevant_adverbs,
                        &child.lemma_lower(),
                    ) =>
            {
                skip.insert(child.index);
            }
            _ if heuristics
                && attach == Attachment::O
                && is_pp(child)
                && is_temporal(tree, child.index, config) =>
            {
                // PP-attachment repair: temporal PPs belong to the verb
                fields.time.push(Attributed::new(Attachment::V, text()));
                skip.insert(child.index);
            }
            _ => {
                fields.notes.push(Attributed::new(attach, text()));
                skip.insert(child.index);
            }
        }
    }
    skip
}

fn clause_markers(tree: &DependencyTree, clause: usize) -> Vec<String> {
    let mut markers = Vec::new();
    for c in tree.children(clause) {
        if c.deprel == "mark" || (c.deprel == "advmod" && c.index < clause) {
            let mut words = vec![(c.index, c.lemma_lower())];
            words.extend(
                tree.children_with(c.index, "mwe")
                    .map(|m| (m.index, m.lemma_lower())),
            );
            words.extend(
                tree.children_with(c.index, "fixed")
                    .map(|m| (m.index, m.lemma_lower())),
            );
            words.sort();
            markers.push(
                words
                    .into_iter()
                    .map(|(_, w)| w)
                    .collect::<Vec<_>>()
                    .join("_"),
            );
            markers.push(c.lemma_lower());
        }
    }
    markers
}

fn verb_text(tree: &DependencyTree, frame: &Frame, config: &ExtractionConfig) -> String {
    let pred = tree.token(frame.predicate);
    let copula = frame
        .dependents
        .iter()
        .any(|&d| tree.token(d).deprel == "cop");
    let mut verb = match frame.verb_form {
        VerbForm::Base => normalize_phrase(
            tree,
            frame.predicate,
            &BTreeSet::new(),
            Attachment::V,
            config,
        ),
        VerbForm::Participle => {
            let mut pieces = vec![(pred.index, pred.surface.to_lowercase())];
            pieces.extend(
                tree.children_with(pred.index, "prt")
                    .map(|p| (p.index, p.surface.to_lowercase())),
            );
            format!("[is] {}", normalize::join_pieces(pieces))
        }
    };
    if copula && frame.verb_form == VerbForm::Base {
        verb = format!("[is] {verb}");
    }
    if let Some(p) = &frame.verb_prep {
        verb = format!("{verb} [{}]", p.replace('_', " "));
    }
    verb
}

fn np_text(
    tree: &DependencyTree,
    head: usize,
    skip: &BTreeSet<usize>,
    role: Attachment,
    config: &ExtractionConfig,
) -> String {
    let t = tree.token(head);
    let clausal = matches!(t.upos.as_str(), "VERB" | "AUX") && !is_pronoun(t);
    if clausal {
        render_raw(tree, head, skip, config)
    } else {
        normalize_phrase(tree, head, skip, role, config)
    }
}

/// Populates a row from a converted (active) frame: arguments, modality,
/// and every remaining dependent routed to Time, Adverbials, Conditions or
/// Notes. Indirect objects, under the heuristic layer, add further rows
/// that follow the first.
pub fn route_modifiers(
    tree: &DependencyTree,
    frame: &Frame,
    config: &ExtractionConfig,
) -> Vec<ClauseRow> {
    let heuristics = config.heuristics_enabled;
    let none = BTreeSet::new();
    let mut fields = Fields::default();
    let pred = tree.token(frame.predicate);

    // arguments
    let subject = frame.subject.map(|s| {
        let skip = route_np(tree, s.head, Attachment::S, config, &mut fields);
        np_text(tree, s.head, &skip, Attachment::S, config)
    });
    let object = frame.object.map(|o| {
        let skip = route_np(tree, o.head, Attachment::O, config, &mut fields);
        np_text(tree, o.head, &skip, Attachment::O, config)
    });

    // modality
    let aux: Vec<&Token> = frame
        .dependents
        .iter()
        .map(|&d| tree.token(d))
        .filter(|t| t.deprel == "aux")
        .collect();
    let neg: Option<&Token> = frame
        .dependents
        .iter()
        .map(|&d| tree.token(d))
        .find(|t| t.deprel == "neg");
    let mut modality = classify_modality(pred, &aux, neg.is_some(), config);
    let copular = frame
        .dependents
        .iter()
        .any(|&d| tree.token(d).deprel == "cop");
    if heuristics
        && copular
        && !matches!(pred.upos.as_str(), "VERB" | "AUX")
        && aux.iter().any(|a| a.lemma_lower() == "shall")
    {
        // "shall be" + adjective/noun reads as a declaration unless another cue says otherwise
        let others: Vec<&Token> = aux
            .iter()
            .copied()
            .filter(|a| a.lemma_lower() != "shall")
            .collect();
        let without_shall = classify_modality(pred, &others, false, config);
        if without_shall == Modality::D {
            modality = Modality::D;
        }
    }
    if let (Some(n), Modality::D) = (neg, modality) {
        fields
            .notes
            .push(Attributed::new(Attachment::V, n.surface.clone()));
    }

    // verb-level modifiers
    let mut consumed: BTreeSet<usize> = BTreeSet::new();
    consumed.extend(frame.subject.map(|s| s.dependent));
    consumed.extend(frame.object.map(|o| o.dependent));
    consumed.extend(frame.agent.map(|a| a.dependent));
    consumed.extend(frame.seq_marker);
    let mut indirect = Vec::new();
    for &d in &frame.dependents {
        if consumed.contains(&d) {
            continue;
        }
        let t = tree.token(d);
        let label = t.deprel.as_str();
        let text = || render_raw(tree, d, &none, config);
        let lemma = t.lemma_lower();
        match label {
            "aux" | "auxpass" | "neg" | "cop" | "punct" | "cc" | "preconj" | "mark" | "prt"
            | "expl" => {}
            "iobj" if heuristics => indirect.push(d),
            "advmod"
                if heuristics && ExtractionConfig::listed(&config.irrelevant_adverbs, &lemma) => {}
            "advmod" if heuristics && ExtractionConfig::listed(&config.time_markers, &lemma) => {
                fields.time.push(Attributed::new(Attachment::V, text()))
            }
            "advmod" => fields
                .adverbials
                .push(Attributed::new(Attachment::V, text())),
            _ if is_pp(t) || label == "agent" => {
                if heuristics && is_temporal(tree, d, config) {
                    fields.time.push(Attributed::new(Attachment::V, text()));
                } else {
                    fields
                        .adverbials
                        .push(Attributed::new(Attachment::V, text()));
                }
            }
            "advcl" => {
                let markers = clause_markers(tree, d);
                let has =
                    |list: &[String]| markers.iter().any(|m| ExtractionConfig::listed(list, m));
                if heuristics && has(&config.condition_markers) {
                    fields
                        .conditions
                        .push(Attributed::new(Attachment::V, text()));
                } else if heuristics && has(&config.time_markers) {
                    fields.time.push(Attributed::new(Attachment::V, text()));
                } else {
                    fields
                        .adverbials
                        .push(Attributed::new(Attachment::V, text()));
                }
            }
            _ => fields.notes.push(Attributed::new(Attachment::V, text())),
        }
    }

    let verb = verb_text(tree, frame, config);
    let subject = subject.unwrap_or_default();
    let mut row = ClauseRow {
        refinement: None,
        modality,
        subject,
        verb,
        object,
        time: fields.time,
        adverbials: fields.adverbials,
        conditions: fields.conditions,
        notes: fields.notes,
        diagnostic: None,
    };
    if row.subject.is_empty() {
        row.diagnostic = Some("no subject found".into());
    }

    let mut rows = Vec::with_capacity(1 + indirect.len());
    let base_verb = normalize_phrase(
        tree,
        frame.predicate,
        &BTreeSet::new(),
        Attachment::V,
        config,
    );
    let extra: Vec<ClauseRow> = indirect
        .into_iter()
        .map(|d| {
            let mut skip_fields = Fields::default();
            let skip = route_np(tree, d, Attachment::O, config, &mut skip_fields);
            let mut r = ClauseRow::new(modality, &row.subject, &format!("{base_verb} [to]"), None);
            r.object = Some(np_text(tree, d, &skip, Attachment::O, config));
            r.notes = skip_fields.notes;
            r.conditions = skip_fields.conditions;
            r.time = skip_fields.time;
            r.refinement = Some(Refinement::And);
            r.diagnostic = row.diagnostic.clone();
            r
        })
        .collect();
    rows.push(row);
    rows.extend(extra);
    rows
}

fn incomplete_row(tree: &DependencyTree, diagnostic: &str) -> ClauseRow {
    let mut row = ClauseRow::new(Modality::D, "", "", None);
    row.notes
        .push(Attributed::new(Attachment::V, tree.text.clone()));
    row.diagnostic = Some(diagnostic.to_string());
    row
}

/// Extracts every clause of one sentence, in reading order.
pub fn extract_clauses(tree: &DependencyTree, config: &ExtractionConfig) -> Vec<ClauseRow> {
    let Some(main) = main_predicate(tree, Some(config)) else {
        return vec![incomplete_row(tree, "no identifiable main verb")];
    };
    let mut rows = Vec::new();
    for (frame, conn) in frames_for(tree, main.predicate, Some(config)) {
        let frame = convert_passive(&frame);
        let mut produced = route_modifiers(tree, &frame, config);
        if let Some(first) = produced.first_mut() {
            first.refinement = conn;
        }
        rows.extend(produced);
    }
    if let (Some(intro), Some(first)) = (main.intro, rows.first_mut()) {
        let skip: BTreeSet<usize> = [main.predicate].into_iter().collect();
        first.notes.insert(
            0,
            Attributed::new(Attachment::V, render_raw(tree, intro, &skip, config)),
        );
    }
    if let Some(first) = rows.first_mut() {
        first.refinement = None;
    }
    for row in rows.iter_mut().skip(1) {
        row.refinement.get_or_insert(Refinement::And);
    }
    if rows.is_empty() {
        rows.push(incomplete_row(tree, "no clause produced"));
    }
    rows
}
