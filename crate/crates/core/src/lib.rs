//! Draft deontic clause extraction for normative texts.
//!
//! The crate takes dependency-parsed sentences (CoNLL-U), extracts
//! obligation, permission, prohibition and declaration clauses into an
//! editable tab-separated clause table, converts completed tables into
//! C-O Diagram models, answers syntactic queries over those models and
//! scores extraction output against gold tables.
//!
//! ```
//! use normex::{extract_document, ExtractionConfig, LabelMap, to_tsv};
//!
//! let conllu = "# sent_id = 1\n# text = You will not upload viruses.\n\
//! 1\tYou\tyou\tPRON\tPRP\t_\t4\tnsubj\t_\t_\n\
//! 2\twill\twill\tAUX\tMD\t_\t4\taux\t_\t_\n\
//! 3\tnot\tnot\tPART\tRB\t_\t4\tneg\t_\t_\n\
//! 4\tupload\tupload\tVERB\tVB\t_\t0\troot\t_\t_\n\
//! 5\tviruses\tvirus\tNOUN\tNNS\t_\t4\tobj\t_\t_\n";
//! let trees = normex::parse_conllu(conllu.as_bytes()).unwrap();
//! let out = extract_document("tos", &trees, &LabelMap::default(), &ExtractionConfig::default());
//! assert!(to_tsv(&out.table).contains("\tF\tUser\tupload\tvirus"));
//! ```

pub mod codiag;
pub mod config;
pub mod conllu;
pub mod eval;
pub mod extract;
pub mod labels;
pub mod modality;
pub mod query;
pub mod table;

pub use codiag::{CODiagram, DiagramBox, DiagramError, Finding};
pub use config::{ConfigError, ExtractionConfig};
pub use conllu::{parse_conllu, write_conllu, ConlluError, DependencyTree, Token};
pub use eval::{report_text, report_tsv, score, ConfigLabel, EvalError, Metrics, ScoreReport};
pub use extract::extract_clauses;
pub use labels::{map_labels, LabelMap, LabelWarning};
pub use modality::{Modality, Refinement};
pub use query::{eval_query, parse_query, Query, QueryError, QueryResult};
pub use table::{
    from_tsv, from_tsv_str, to_tsv, Attachment, Attributed, ClauseRow, ClauseTable, SentenceGroup,
    TableError,
};

/// Any error raised by the pipeline stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Conllu(#[from] ConlluError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Result of running the extractor over a whole document.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub table: ClauseTable,
    pub warnings: Vec<LabelWarning>,
}

/// Maps labels and extracts every sentence, keeping document order.
pub fn extract_document(
    document_id: &str,
    trees: &[DependencyTree],
    labels: &LabelMap,
    config: &ExtractionConfig,
) -> Extraction {
    let mut table = ClauseTable::new(document_id);
    let mut warnings = Vec::new();
    for tree in trees {
        let (mapped, w) = map_labels(tree, labels);
        warnings.extend(w);
        table.groups.push(SentenceGroup {
            sentence_id: tree.sentence_id.clone(),
            text: tree.text.clone(),
            rows: extract_clauses(&mapped, config),
        });
    }
    Extraction { table, warnings }
}
