//! Runs syntactic queries against the bundled SLA contract model, or
//! against a model and query given on the command line.
//!
//! Run with `cargo run --example query_sla_model [model.json "(query)"]`.

use normex::{eval_query, parse_query, CODiagram};

const SLA_MODEL: &str = include_str!("../tests/data/sla_model.json");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (model, queries) = match args.as_slice() {
        [path, query] => (std::fs::read_to_string(path)?, vec![query.clone()]),
        _ => (
            SLA_MODEL.to_string(),
            [
                "(exists (isObl))",
                "(select (and (isObl) (not (hasTimeRestriction))))",
                "(select (and (isObl) (not (hasReparation)) (not (hasTimeRestriction))))",
                r#"(select (agentIs "company"))"#,
                "(forall (or (isRefined) (hasGuard)))",
                "(exists (isPerm))",
            ]
            .map(String::from)
            .to_vec(),
        ),
    };
    let diagram = CODiagram::from_json(&model)?;
    for q in queries {
        let result = eval_query(&parse_query(&q)?, &diagram);
        println!("{q}\n{}", textwrap(&result.to_string()));
    }
    Ok(())
}

fn textwrap(result: &str) -> String {
    if result.is_empty() {
        "  (no boxes)\n".into()
    } else {
        result.lines().map(|l| format!("  {l}\n")).collect()
    }
}
