//! Maps a Universal Dependencies parse onto the Stanford labels the
//! extractor reads, and shows which labels changed.
//!
//! Run with `cargo run --example label_mapping [path.conllu]`.

use normex::{map_labels, parse_conllu, LabelMap};

const SAMPLE: &str = include_str!("../tests/data/golden_ud.conllu");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    let map = LabelMap::default();
    for tree in parse_conllu(text.as_bytes())? {
        let (mapped, warnings) = map_labels(&tree, &map);
        println!("# {}", tree.sentence_id);
        for (before, after) in tree.tokens.iter().zip(&mapped.tokens) {
            if before.deprel != after.deprel {
                println!(
                    "  {:<12} {:<12} -> {}",
                    before.surface, before.deprel, after.deprel
                );
            }
        }
        for w in warnings {
            println!("  unmapped: {w}");
        }
    }
    Ok(())
}
