//! Scores rules-only and full extraction of the bundled sample against its
//! gold table and prints both report layouts.
//!
//! Run with `cargo run --example score_extraction`.

use normex::eval::report_fields;
use normex::{
    extract_document, from_tsv_str, parse_conllu, report_text, report_tsv, score, ConfigLabel,
    ExtractionConfig, LabelMap,
};

const SAMPLE: &str = include_str!("../tests/data/golden.conllu");
const GOLD: &str = include_str!("../tests/data/golden_gold.tsv");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trees = parse_conllu(SAMPLE.as_bytes())?;
    let gold = from_tsv_str(GOLD)?;
    let mut reports = Vec::new();
    for (label, config) in [
        (ConfigLabel::RulesOnly, ExtractionConfig::rules_only()),
        (ConfigLabel::RulesAndHeuristics, ExtractionConfig::default()),
    ] {
        let output =
            extract_document(&gold.document_id, &trees, &LabelMap::default(), &config).table;
        reports.push(score(&output, &gold, label, false)?);
    }
    print!("{}\n{}\n", report_text(&reports), report_tsv(&reports));
    for r in &reports {
        println!("{}", report_fields(r));
    }
    Ok(())
}
