//! Prints how modal signals combine: the strongest of D < P < O < F wins,
//! and negation turns O and P into F.
//!
//! Run with `cargo run --example modality_lattice [word ...]`.

use normex::modality::modality_from_signals;
use normex::ExtractionConfig;

fn main() {
    let words: Vec<String> = std::env::args().skip(1).collect();
    let sets: Vec<Vec<&str>> = if words.is_empty() {
        vec![
            vec!["may"],
            vec!["must"],
            vec!["will"],
            vec!["can", "shall"],
            vec!["responsible"],
            vec![],
        ]
    } else {
        vec![words.iter().map(String::as_str).collect()]
    };
    let configs = [
        ("rules", ExtractionConfig::rules_only()),
        ("heuristics", ExtractionConfig::default()),
    ];
    println!(
        "{:<22}{:>8}{:>12}{:>14}{:>18}",
        "signals", "rules", "rules+not", "heuristics", "heuristics+not"
    );
    for set in sets {
        let label = if set.is_empty() {
            "(none)".to_string()
        } else {
            set.join(" ")
        };
        let cells: Vec<String> = configs
            .iter()
            .flat_map(|(_, cfg)| {
                [false, true]
                    .map(|neg| modality_from_signals(set.iter().copied(), neg, cfg).to_string())
            })
            .collect();
        println!(
            "{label:<22}{:>8}{:>12}{:>14}{:>18}",
            cells[0], cells[1], cells[2], cells[3]
        );
    }
}
