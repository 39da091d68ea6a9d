use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn normex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normex"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn extract_without_heuristics_leaves_time_and_conditions_empty() {
    let out = normex(&["extract", path(&data("golden.conllu")), "--no-heuristics"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r.len(), 9);
        assert_eq!(r[5], "", "Time");
        assert_eq!(r[7], "", "Conditions");
    }
}

#[test]
fn extract_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("out.tsv");
    let out = normex(&["extract", path(&data("golden_ud.conllu")), "-o", path(&tsv)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&tsv).unwrap();
    let gold = std::fs::read_to_string(data("golden_gold.tsv")).unwrap();
    assert_eq!(
        written.replace("#@document\tgolden_ud", ""),
        gold.replace("#@document\tgolden", "")
    );
}

#[test]
fn config_file_switches_heuristics_off() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"heuristics_enabled": false}"#).unwrap();
    let with_cfg = normex(&[
        "extract",
        path(&data("golden.conllu")),
        "--config",
        path(&cfg),
    ]);
    let with_flag = normex(&["extract", path(&data("golden.conllu")), "--no-heuristics"]);
    assert_eq!(stdout(&with_cfg), stdout(&with_flag));

    std::fs::write(&cfg, r#"{"time_nouns": ["Day"]}"#).unwrap();
    let bad = normex(&[
        "extract",
        path(&data("golden.conllu")),
        "--config",
        path(&cfg),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("cfg.json"));
}

#[test]
fn label_map_override_flags_unknown_labels() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.json");
    std::fs::write(
        &map,
        r#"{"canonical": ["root"], "collapse": [], "rules": []}"#,
    )
    .unwrap();
    let out = normex(&[
        "extract",
        path(&data("golden_ud.conllu")),
        "--label-map",
        path(&map),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("nsubj"));
}

#[test]
fn convert_then_query() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("model.json");
    let out = normex(&["convert", path(&data("golden_gold.tsv")), "-o", path(&json)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let q = normex(&["query", path(&json), "-q", r#"(select (agentIs "renter"))"#]);
    assert_eq!(stdout(&q), "golden_5_1\ngolden_5_2\n");
    let q = normex(&[
        "query",
        path(&json),
        "-q",
        r#"(exists (and (isPerm) (agentIs "person")))"#,
    ]);
    assert_eq!(stdout(&q), "true\n");
}

#[test]
fn query_sla_model() {
    let fig = data("sla_model.json");
    let out = normex(&["query", path(&fig), "-q", "(exists (isObl))"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "true\n");
    let out = normex(&[
        "query",
        path(&fig),
        "-q",
        "(select (and (isObl) (not (hasTimeRestriction))))",
    ]);
    assert_eq!(stdout(&out), "");
    let out = normex(&["query", path(&fig), "-q", "(select (hasReparation))"]);
    assert_eq!(stdout(&out), "respond\nrespond1\nrespond2\n");
}

#[test]
fn eval_identity_reports_ones() {
    let gold = data("golden_gold.tsv");
    let out = normex(&["eval", "--output", path(&gold), "--gold", path(&gold)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.lines()
            .nth(2)
            .unwrap()
            .contains("1.00    1.00    1.00"),
        "{text}"
    );
    let out = normex(&[
        "eval",
        "--output",
        path(&gold),
        "--gold",
        path(&gold),
        "--format",
        "tsv",
        "--label",
        "rules-only",
    ]);
    assert_eq!(
        stdout(&out).lines().nth(1).unwrap(),
        "golden\t1.00\t1.00\t1.00\t—\t—\t—"
    );
}

#[test]
fn eval_rules_only_scores_below_gold() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("rules.tsv");
    normex(&[
        "extract",
        path(&data("golden.conllu")),
        "--no-heuristics",
        "-o",
        path(&tsv),
    ]);
    let out = normex(&[
        "eval",
        "--output",
        path(&tsv),
        "--gold",
        path(&data("golden_gold.tsv")),
        "--format",
        "tsv",
    ]);
    let line = stdout(&out).lines().nth(1).unwrap().to_string();
    let f1: f64 = line.split('\t').nth(6).unwrap().parse().unwrap();
    assert!(f1 < 1.0 && f1 > 0.5, "{line}");
}

#[test]
fn exit_codes() {
    // missing input file: usage error
    let out = normex(&["convert", "does-not-exist.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("does-not-exist.tsv"));
    // unknown subcommand and missing argument
    assert_eq!(normex(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        normex(&["query", path(&data("sla_model.json"))])
            .status
            .code(),
        Some(2)
    );

    // invalid table names the line
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    let mut text = std::fs::read_to_string(data("golden_gold.tsv")).unwrap();
    text = text.replacen("\tP\tperson", "\tQ\tperson", 1);
    std::fs::write(&bad, text).unwrap();
    let out = normex(&["convert", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("bad.tsv: line 11"),
        "{}",
        stderr(&out)
    );

    // empty verb cannot become a box
    let empty = dir.path().join("empty.tsv");
    std::fs::write(&empty, "Refinement\tModality\tSubject\tVerb\tObject\tTime\tAdverbials\tConditions\tNotes\n# 1\tx\n\tO\tUser\t\t\t\t\t\t\n").unwrap();
    let out = normex(&["convert", path(&empty)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("row 1"));

    // unknown query atom and malformed model
    let out = normex(&[
        "query",
        path(&data("sla_model.json")),
        "-q",
        "(exists (isMaybe))",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("isMaybe"));
    let model = dir.path().join("m.json");
    std::fs::write(&model, r#"{"roots": [{"name": "a", "content": {"kind": "leaf", "modality": "Q", "action": {"verb": "x"}}}]}"#).unwrap();
    let out = normex(&["query", path(&model), "-q", "(exists (isObl))"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/roots/0/content/modality"));

    // bad CoNLL-U names the line
    let conllu = dir.path().join("bad.conllu");
    std::fs::write(&conllu, "1\tYou\tyou\tPRON\t_\t_\tx\tnsubj\t_\t_\n").unwrap();
    let out = normex(&["extract", path(&conllu)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let (tsv, json) = (dir.path().join("t.tsv"), dir.path().join("m.json"));
        normex(&["extract", path(&data("golden_ud.conllu")), "-o", path(&tsv)]);
        normex(&["convert", path(&tsv), "-o", path(&json)]);
        let q = normex(&["query", path(&json), "-q", "(select (isLeaf))"]);
        (
            std::fs::read(&tsv).unwrap(),
            std::fs::read(&json).unwrap(),
            q.stdout,
        )
    };
    assert_eq!(run(), run());
}
