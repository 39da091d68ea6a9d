//! Command-line front end: `extract`, `convert`, `query` and `eval`.
//!
//! Exit status is 0 on success, 1 when an input fails validation and 2 on
//! usage errors (bad arguments, missing or unreadable files).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use normex::eval::report_fields;
use normex::{
    eval_query, extract_document, from_tsv, parse_conllu, parse_query, report_text, report_tsv,
    score, to_tsv, CODiagram, ConfigLabel, ExtractionConfig, LabelMap,
};

#[derive(Parser)]
#[command(
    name = "normex",
    version,
    about = "Draft deontic clause extraction from dependency-parsed text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a clause table (TSV) from a CoNLL-U file.
    Extract {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Use the rule layer only.
        #[arg(long)]
        no_heuristics: bool,
        /// Extraction config JSON; missing keys take the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Label-map JSON replacing the bundled UD to Stanford map.
        #[arg(long)]
        label_map: Option<PathBuf>,
    },
    /// Convert a clause table into a C-O Diagram JSON model.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a syntactic query against a diagram model.
    Query {
        model: PathBuf,
        #[arg(short, long)]
        query: String,
    },
    /// Score an extracted table against a gold table.
    Eval {
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Compare head words only.
        #[arg(long)]
        lenient: bool,
        /// Configuration block the scores are reported under.
        #[arg(long, value_enum, default_value_t = Label::RulesAndHeuristics)]
        label: Label,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Label {
    RulesOnly,
    RulesAndHeuristics,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

enum Failure {
    Usage(String),
    Invalid(String),
}

type Run = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?)
        .map_err(|_| Failure::Invalid(format!("{}: not valid UTF-8", path.display())))
}

fn require(paths: &[&Path]) -> Run {
    for p in paths {
        if !p.is_file() {
            return Err(Failure::Usage(format!("{}: no such file", p.display())));
        }
    }
    Ok(())
}

fn emit(output: Option<&Path>, data: &str) -> Run {
    match output {
        Some(p) => {
            std::fs::write(p, data).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn invalid(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(format!("{}: {e}", path.display()))
}

fn document_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_diagram(path: &Path) -> Result<CODiagram, Failure> {
    let diagram = CODiagram::from_json(&read_text(path)?).map_err(|e| invalid(path, e))?;
    let findings = diagram.validate();
    if !findings.is_empty() {
        for f in &findings {
            eprintln!("{}: {f}", path.display());
        }
        return Err(invalid(
            path,
            format!("{} validation finding(s)", findings.len()),
        ));
    }
    Ok(diagram)
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Extract {
            input,
            output,
            no_heuristics,
            config,
            label_map,
        } => {
            let mut wanted = vec![input.as_path()];
            wanted.extend(config.as_deref());
            wanted.extend(label_map.as_deref());
            require(&wanted)?;
            let mut cfg = match &config {
                Some(p) => {
                    ExtractionConfig::from_json(&read_text(p)?).map_err(|e| invalid(p, e))?
                }
                None => ExtractionConfig::default(),
            };
            if no_heuristics {
                cfg.heuristics_enabled = false;
            }
            let labels = match &label_map {
                Some(p) => LabelMap::from_json(&read_text(p)?).map_err(|e| invalid(p, e))?,
                None => LabelMap::default(),
            };
            let trees = parse_conllu(read(&input)?.as_slice()).map_err(|e| invalid(&input, e))?;
            let result = extract_document(&document_id(&input), &trees, &labels, &cfg);
            for w in &result.warnings {
                eprintln!("{}: {w}", input.display());
            }
            for g in &result.table.groups {
                for (k, row) in g.rows.iter().enumerate() {
                    if let Some(d) = &row.diagnostic {
                        eprintln!(
                            "{}: sentence {}, row {}: {d}",
                            input.display(),
                            g.sentence_id,
                            k + 1
                        );
                    }
                }
            }
            emit(output.as_deref(), &to_tsv(&result.table))
        }
        Command::Convert { input, output } => {
            require(&[&input])?;
            let table = from_tsv(&read(&input)?).map_err(|e| invalid(&input, e))?;
            let (diagram, warnings) =
                CODiagram::from_table(&table).map_err(|e| invalid(&input, e))?;
            for w in &warnings {
                eprintln!("{}: {w}", input.display());
            }
            let findings = diagram.validate();
            if !findings.is_empty() {
                for f in &findings {
                    eprintln!("{}: {f}", input.display());
                }
                return Err(invalid(
                    &input,
                    format!("{} validation finding(s)", findings.len()),
                ));
            }
            emit(output.as_deref(), &(diagram.to_json() + "\n"))
        }
        Command::Query { model, query } => {
            require(&[&model])?;
            let q = parse_query(&query).map_err(|e| Failure::Invalid(format!("query: {e}")))?;
            let diagram = load_diagram(&model)?;
            emit(None, &eval_query(&q, &diagram).to_string())
        }
        Command::Eval {
            output,
            gold,
            lenient,
            label,
            format,
        } => {
            require(&[&output, &gold])?;
            let out_table = from_tsv(&read(&output)?).map_err(|e| invalid(&output, e))?;
            let gold_table = from_tsv(&read(&gold)?).map_err(|e| invalid(&gold, e))?;
            let label = match label {
                Label::RulesOnly => ConfigLabel::RulesOnly,
                Label::RulesAndHeuristics => ConfigLabel::RulesAndHeuristics,
            };
            let mut report = score(&out_table, &gold_table, label, lenient).map_err(|e| {
                Failure::Invalid(format!("{} vs {}: {e}", output.display(), gold.display()))
            })?;
            if report.document_id.is_empty() {
                report.document_id = document_id(&gold);
            }
            let reports = [report];
            let text = match format {
                Format::Text => {
                    format!("{}\n{}", report_text(&reports), report_fields(&reports[0]))
                }
                Format::Tsv => report_tsv(&reports),
            };
            emit(None, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
