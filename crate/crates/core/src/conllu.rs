//! CoNLL-U ingestion.
//!
//! Reads dependency-parsed sentences, skipping multiword-token ranges and
//! empty nodes, and checks that every sentence forms a single-rooted tree.
//! Only the columns the extractor needs are kept: ID, FORM, LEMMA, UPOS,
//! XPOS, FEATS, HEAD and DEPREL.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sentence {sentence}: {message}")]
    Structure { sentence: String, message: String },
    #[error("input is not valid UTF-8: {0}")]
    Encoding(#[from] std::string::FromUtf8Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A single word of a parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: Option<String>,
    /// Index of the governor, 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub feats: BTreeMap<String, String>,
}

impl Token {
    pub fn new(
        index: usize,
        surface: &str,
        lemma: &str,
        upos: &str,
        head: usize,
        deprel: &str,
    ) -> Self {
        Token {
            index,
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            upos: upos.to_string(),
            xpos: None,
            head,
            deprel: deprel.to_string(),
            feats: BTreeMap::new(),
        }
    }

    pub fn lemma_lower(&self) -> String {
        self.lemma.to_lowercase()
    }

    pub fn feat(&self, key: &str) -> Option<&str> {
        self.feats.get(key).map(String::as_str)
    }

    pub fn is_punct(&self) -> bool {
        self.upos == "PUNCT" || self.deprel == "punct"
    }
}

/// One parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyTree {
    pub sentence_id: String,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl DependencyTree {
    /// Builds a tree and checks the structural invariants.
    pub fn new(
        sentence_id: impl Into<String>,
        text: impl Into<String>,
        tokens: Vec<Token>,
    ) -> Result<Self, ConlluError> {
        let tree = DependencyTree {
            sentence_id: sentence_id.into(),
            text: text.into(),
            tokens,
        };
        tree.check()?;
        Ok(tree)
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    pub fn root(&self) -> Option<&Token> {
        self.tokens.iter().find(|t| t.head == 0)
    }

    /// Direct dependents of `index`, in sentence order.
    pub fn children(&self, index: usize) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    pub fn children_with<'a>(
        &'a self,
        index: usize,
        deprel: &'a str,
    ) -> impl Iterator<Item = &'a Token> + 'a {
        self.children(index).filter(move |t| t.deprel == deprel)
    }

    pub fn first_child_with(&self, index: usize, deprel: &str) -> Option<&Token> {
        self.children(index).find(|t| t.deprel == deprel)
    }

    /// All indices in the subtree rooted at `index`, sorted.
    pub fn subtree(&self, index: usize) -> Vec<usize> {
        let mut out = vec![index];
        let mut stack = vec![index];
        while let Some(i) = stack.pop() {
            for c in self.children(i) {
                out.push(c.index);
                stack.push(c.index);
            }
        }
        out.sort_unstable();
        out
    }

    /// Verifies indices, single root and acyclicity.
    pub fn check(&self) -> Result<(), ConlluError> {
        let fail = |message: String| ConlluError::Structure {
            sentence: self.sentence_id.clone(),
            message,
        };
        if self.tokens.is_empty() {
            return Err(fail("sentence has no tokens".into()));
        }
        let n = self.tokens.len();
        for (pos, t) in self.tokens.iter().enumerate() {
            if t.index != pos + 1 {
                return Err(fail(format!(
                    "token {} out of sequence (expected {})",
                    t.index,
                    pos + 1
                )));
            }
            if t.head > n {
                return Err(fail(format!(
                    "token {} has head {} beyond sentence length {}",
                    t.index, t.head, n
                )));
            }
            if t.head == t.index {
                return Err(fail(format!("token {} is its own head", t.index)));
            }
        }
        let roots: Vec<usize> = self
            .tokens
            .iter()
            .filter(|t| t.head == 0)
            .map(|t| t.index)
            .collect();
        match roots.len() {
            0 => return Err(fail("no root token".into())),
            1 => {}
            _ => return Err(fail(format!("multiple roots at tokens {roots:?}"))),
        }
        for t in &self.tokens {
            let mut cur = t.index;
            let mut steps = 0;
            while cur != 0 {
                cur = self.tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(fail(format!("cycle through token {}", t.index)));
                }
            }
        }
        Ok(())
    }
}

/// Parses a CoNLL-U stream into trees, in file order.
pub fn parse_conllu<R: Read>(mut input: R) -> Result<Vec<DependencyTree>, ConlluError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes)?;
    parse_conllu_str(&text)
}

pub fn parse_conllu_str(text: &str) -> Result<Vec<DependencyTree>, ConlluError> {
    let mut trees = Vec::new();
    let mut block = Block::default();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(tree) = block.finish(trees.len() + 1)? {
                trees.push(tree);
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            block.comment(comment.trim());
            continue;
        }
        if block.start_line == 0 {
            block.start_line = lineno;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::Parse {
                line: lineno,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        // multiword ranges ("3-4") and empty nodes ("5.1")
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0].parse().map_err(|_| ConlluError::Parse {
            line: lineno,
            message: format!("non-integer token id `{}`", cols[0]),
        })?;
        let head: usize = cols[6].parse().map_err(|_| ConlluError::Parse {
            line: lineno,
            message: format!("non-integer head `{}`", cols[6]),
        })?;
        let surface = cols[1].to_string();
        let lemma = if cols[2] == "_" && surface != "_" {
            surface.to_lowercase()
        } else {
            cols[2].to_string()
        };
        let feats = parse_feats(cols[5]).map_err(|message| ConlluError::Parse {
            line: lineno,
            message,
        })?;
        block.tokens.push(Token {
            index,
            surface,
            lemma,
            upos: cols[3].to_string(),
            xpos: (cols[4] != "_").then(|| cols[4].to_string()),
            head,
            deprel: cols[7].to_string(),
            feats,
        });
    }
    if let Some(tree) = block.finish(trees.len() + 1)? {
        trees.push(tree);
    }
    Ok(trees)
}

fn parse_feats(col: &str) -> Result<BTreeMap<String, String>, String> {
    let mut feats = BTreeMap::new();
    if col == "_" {
        return Ok(feats);
    }
    for pair in col.split('|') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| format!("malformed feature `{pair}`"))?;
        feats.insert(k.to_string(), v.to_string());
    }
    Ok(feats)
}

#[derive(Default)]
struct Block {
    sent_id: Option<String>,
    text: Option<String>,
    tokens: Vec<Token>,
    start_line: usize,
}

impl Block {
    fn comment(&mut self, body: &str) {
        if let Some((key, value)) = body.split_once('=') {
            match key.trim() {
                "sent_id" => self.sent_id = Some(value.trim().to_string()),
                "text" => self.text = Some(value.trim().to_string()),
                _ => {}
            }
        }
    }

    fn finish(&mut self, ordinal: usize) -> Result<Option<DependencyTree>, ConlluError> {
        let block = std::mem::take(self);
        if block.tokens.is_empty() {
            return Ok(None);
        }
        let text = block.text.unwrap_or_else(|| {
            block
                .tokens
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        });
        let id = block.sent_id.unwrap_or_else(|| ordinal.to_string());
        DependencyTree::new(id, text, block.tokens).map(Some)
    }
}

/// Serializes trees back to CoNLL-U. Columns the tool does not read are `_`.
pub fn write_conllu(trees: &[DependencyTree]) -> String {
    let mut out = String::new();
    for tree in trees {
        let _ = writeln!(out, "# sent_id = {}", tree.sentence_id);
        let _ = writeln!(out, "# text = {}", tree.text);
        for t in &tree.tokens {
            let feats = if t.feats.is_empty() {
                "_".to_string()
            } else {
                t.feats
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join("|")
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t_\t_",
                t.index,
                t.surface,
                t.lemma,
                t.upos,
                t.xpos.as_deref().unwrap_or("_"),
                feats,
                t.head,
                t.deprel
            );
        }
        out.push('\n');
    }
    out
}
