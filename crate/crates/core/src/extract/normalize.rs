//! Surface rendering of phrases for the clause table.
//!
//! Two renderings exist. Modifier phrases keep their original wording
//! (`render_raw`), apart from pronoun rewriting and possessors, which are
//! always normalized (`the renter's risk` becomes `renter's risk`).
//! Subject and object values go through `normalize_phrase`: head lemma,
//! no articles, and `X's Y` turned into `Y of X`.

use std::collections::BTreeSet;

use crate::config::ExtractionConfig;
use crate::conllu::{DependencyTree, Token};
use crate::table::Attachment;

/// Dependents dropped from normalized noun phrases.
const NP_DROPPED: [&str; 8] = [
    "det",
    "predet",
    "case",
    "punct",
    "possessive",
    "cc",
    "conj",
    "preconj",
];

pub fn is_pronoun(token: &Token) -> bool {
    token.upos == "PRON"
        || token.xpos.as_deref().is_some_and(|x| x.starts_with("PRP"))
        || token.feat("PronType") == Some("Prs")
}

/// The configured tag for a pronoun, or its surface form when unmapped.
pub fn resolve_anaphora(token: &Token, config: &ExtractionConfig) -> String {
    lookup_anaphora(token, config).unwrap_or_else(|| token.surface.clone())
}

fn lookup_anaphora(token: &Token, config: &ExtractionConfig) -> Option<String> {
    config
        .anaphora_map
        .get(&token.surface.to_lowercase())
        .or_else(|| config.anaphora_map.get(&token.lemma_lower()))
        .cloned()
}

/// Rendering of a possessor as it appears in front of its possessum.
fn possessor_prefix(tree: &DependencyTree, index: usize, config: &ExtractionConfig) -> String {
    let token = tree.token(index);
    if is_pronoun(token) {
        return match lookup_anaphora(token, config) {
            Some(tag) => format!("{tag}'s"),
            None => token.surface.clone(),
        };
    }
    format!(
        "{}'s",
        normalize_phrase(tree, index, &BTreeSet::new(), Attachment::O, config)
    )
}

fn word_form(token: &Token, config: &ExtractionConfig) -> String {
    if is_pronoun(token) {
        if let Some(tag) = lookup_anaphora(token, config) {
            return tag;
        }
    }
    token.surface.clone()
}

fn collect_raw(
    tree: &DependencyTree,
    index: usize,
    top: usize,
    skip: &BTreeSet<usize>,
    config: &ExtractionConfig,
    out: &mut Vec<(usize, String)>,
) {
    if skip.contains(&index) {
        return;
    }
    let token = tree.token(index);
    if index != top && token.deprel == "poss" {
        out.push((index, possessor_prefix(tree, index, config)));
        return;
    }
    out.push((index, word_form(token, config)));
    for child in tree.children(index) {
        collect_raw(tree, child.index, top, skip, config, out);
    }
}

fn is_punct_piece(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_punctuation() || c == '–' || c == '—')
}

fn glue_left(s: &str) -> bool {
    matches!(
        s,
        "," | "." | ";" | ":" | ")" | "]" | "?" | "!" | "%" | "'s" | "'" | "n't"
    )
}

fn glue_right(s: &str) -> bool {
    matches!(s, "(" | "[" | "$")
}

/// Joins ordered word pieces with English spacing; edge punctuation is trimmed.
pub(crate) fn join_pieces(mut pieces: Vec<(usize, String)>) -> String {
    pieces.sort_by_key(|(i, _)| *i);
    let words: Vec<String> = pieces.into_iter().map(|(_, w)| w).collect();
    let start = words.iter().position(|w| !is_punct_piece(w));
    let end = words.iter().rposition(|w| !is_punct_piece(w));
    let (Some(start), Some(end)) = (start, end) else {
        return String::new();
    };
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for w in &words[start..=end] {
        if let Some(p) = prev {
            if !glue_left(w) && !glue_right(p) {
                out.push(' ');
            }
        }
        out.push_str(w);
        prev = Some(w);
    }
    out
}

/// Original wording of the subtree at `index`, minus the `skip` subtrees.
pub fn render_raw(
    tree: &DependencyTree,
    index: usize,
    skip: &BTreeSet<usize>,
    config: &ExtractionConfig,
) -> String {
    let mut pieces = Vec::new();
    collect_raw(tree, index, index, skip, config, &mut pieces);
    join_pieces(pieces)
}

/// Normalized value of the phrase headed by `head`.
///
/// `skip` holds dependents already routed to another field. For the verb
/// role only the lemma and any particle are kept; brackets for copulas and
/// folded prepositions are added by the caller, which knows the voice.
pub fn normalize_phrase(
    tree: &DependencyTree,
    head: usize,
    skip: &BTreeSet<usize>,
    role: Attachment,
    config: &ExtractionConfig,
) -> String {
    let token = tree.token(head);
    if role == Attachment::V {
        let mut pieces = vec![(head, lemma_or_surface(token))];
        for prt in tree.children_with(head, "prt") {
            pieces.push((prt.index, prt.surface.to_lowercase()));
        }
        return join_pieces(pieces);
    }
    let head_form = if is_pronoun(token) {
        resolve_anaphora(token, config)
    } else {
        lemma_or_surface(token)
    };
    let mut pieces = vec![(head, head_form)];
    let mut possessor = None;
    for child in tree.children(head) {
        if skip.contains(&child.index) || NP_DROPPED.contains(&child.deprel.as_str()) {
            continue;
        }
        if child.deprel == "poss" {
            possessor = Some(child.index);
            continue;
        }
        pieces.push((child.index, render_raw(tree, child.index, skip, config)));
    }
    let np = join_pieces(pieces);
    match possessor {
        None => np,
        Some(p) => {
            let owner = tree.token(p);
            if is_pronoun(owner) {
                match lookup_anaphora(owner, config) {
                    Some(tag) => format!("{np} of {tag}"),
                    None => format!("{} {np}", owner.surface),
                }
            } else {
                let of = normalize_phrase(tree, p, &BTreeSet::new(), role, config);
                format!("{np} of {of}")
            }
        }
    }
}

fn lemma_or_surface(token: &Token) -> String {
    if token.lemma.is_empty() || token.lemma == "_" {
        token.surface.clone()
    } else {
        token.lemma.clone()
    }
}
