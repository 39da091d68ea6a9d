//! Converts a clause table into a C-O Diagram model, validates it and
//! prints the JSON.
//!
//! Run with `cargo run --example build_diagram [table.tsv]`.

use normex::{from_tsv, CODiagram};

const GOLD: &str = include_str!("../tests/data/golden_gold.tsv");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bytes = match std::env::args().nth(1) {
        Some(path) => std::fs::read(path)?,
        None => GOLD.as_bytes().to_vec(),
    };
    let table = from_tsv(&bytes)?;
    let (diagram, warnings) = CODiagram::from_table(&table)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let findings = diagram.validate();
    eprintln!(
        "{} roots, {} leaves, {} declarations, {} findings",
        diagram.roots.len(),
        diagram.leaf_count(),
        diagram.declarations.len(),
        findings.len()
    );
    for f in findings {
        eprintln!("finding: {f}");
    }
    println!("{}", diagram.to_json());
    Ok(())
}
