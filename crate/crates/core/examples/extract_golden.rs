//! Extracts the clause table from the bundled six-sentence sample, once with
//! the full heuristic layer and once rules-only.
//!
//! Run with `cargo run --example extract_golden [path.conllu]`.

use normex::{extract_document, parse_conllu, to_tsv, ExtractionConfig, LabelMap};

const SAMPLE: &str = include_str!("../tests/data/golden_ud.conllu");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    let trees = parse_conllu(text.as_bytes())?;
    let labels = LabelMap::default();

    for (title, config) in [
        ("rules & heuristics", ExtractionConfig::default()),
        ("rules only", ExtractionConfig::rules_only()),
    ] {
        let out = extract_document("sample", &trees, &labels, &config);
        println!("== {title} ==");
        print!("{}", to_tsv(&out.table));
        for w in &out.warnings {
            eprintln!(
                "unmapped label `{}` in sentence {} token {}",
                w.label, w.sentence_id, w.token
            );
        }
    }
    Ok(())
}
