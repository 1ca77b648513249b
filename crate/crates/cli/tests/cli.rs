use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn finorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finorder")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn hierarchy_build_reports_sizes() {
    let o = finorder(&["hierarchy", "build", "--base", "thm33", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("stage 1: 8"));

    let o = finorder(&["--format", "json", "hierarchy", "build", "--base", "antichain3", "--depth", "1"]);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["growth"], serde_json::json!([4]));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);

    let o = finorder(&["hierarchy", "build", "--depth", "0"]);
    assert_eq!(stdout(&o), "base: m0 m1 m2 m3\nstage 0: 4\n");
}

#[test]
fn budget_exhaustion_exits_with_two() {
    let o = finorder(&["hierarchy", "build", "--depth", "2", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("stage 2"), "{err}");
    assert!(err.contains("[4, 8]"), "{err}");
}

#[test]
fn invalid_configuration_exits_with_one() {
    assert_eq!(finorder(&["hierarchy", "build", "--base", "nope"]).status.code(), Some(1));
    assert_eq!(finorder(&["verify", "lemma99"]).status.code(), Some(1));
    assert_eq!(finorder(&["--format", "dot", "verify", "lemma31"]).status.code(), Some(1));
    assert_eq!(finorder(&["obstruct", "--poset", "unknown"]).status.code(), Some(1));
    // Rejected by the argument parser.
    assert_ne!(finorder(&["hierarchy", "build", "--budget", "0"]).status.code(), Some(0));
    assert_ne!(finorder(&["obstruct"]).status.code(), Some(0));
}

#[test]
fn verify_suites_succeed() {
    for args in [
        &["verify", "lemma31", "--max-size", "3", "--samples", "200"][..],
        &["verify", "lemma32", "--depth", "1", "--max-size", "4"],
        &["verify", "bao", "--states", "3", "--samples", "200"],
        &["verify", "lemma23"],
    ] {
        let o = finorder(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).contains(" 0 violations"));
    }
}

#[test]
fn obstruct_named_posets() {
    let v = json(&finorder(&["--format", "json", "obstruct", "--poset", "product2x2"]));
    let results = v["result"]["results"].as_array().unwrap();
    let identity = results
        .iter()
        .find(|c| c["p1"] == serde_json::json!([0, 0, 1, 1]) && c["p2"] == serde_json::json!([0, 1, 0, 1]))
        .unwrap();
    assert_eq!(identity["verdict"]["certificate_kind"], "empty_mediating_set");
    assert_eq!(identity["verdict"]["stage"], 1);

    let o = finorder(&["obstruct", "--poset", "singleton"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 of 1 candidates refuted"));
}

#[test]
fn file_inputs_and_output_paths() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    fs::write(&base, r#"{"atoms":["a","b","c"],"less":[["a","b"]]}"#).unwrap();
    let out = dir.path().join("report.json");
    let spec = format!("file:{}", base.display());
    let o = finorder(&["--format", "json", "--out", out.to_str().unwrap(), "hierarchy", "build", "--base", &spec]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    // Only {b, c} and {a, c} are nontrivial antichains.
    assert_eq!(v["result"]["level_sizes"], serde_json::json!([3, 5]));

    fs::write(&base, r#"{"atoms":["a","b"],"less":[["a","b"],["b","a"]]}"#).unwrap();
    assert_eq!(finorder(&["hierarchy", "build", "--base", &spec]).status.code(), Some(1));

    let poset = dir.path().join("p.json");
    fs::write(&poset, r#"{"size":2,"relation":"1101"}"#).unwrap();
    let o = finorder(&["obstruct", "--poset", &format!("file:{}", poset.display())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn export_formats() {
    let dot = stdout(&finorder(&["--format", "dot", "hierarchy", "export", "--depth", "1"]));
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("{m1,m2,m3}"));
    let text = stdout(&finorder(&["hierarchy", "export", "--depth", "1"]));
    assert!(text.lines().next().unwrap().starts_with("0 := atom m0"));
    let v = json(&finorder(&["--format", "json", "hierarchy", "export", "--depth", "1"]));
    assert_eq!(v["result"]["levels"].as_array().unwrap().len(), 2);
    assert_eq!(finorder(&["--format", "dot", "hierarchy", "export", "--depth", "1", "--stage", "3"]).status.code(), Some(1));
}

#[test]
fn timings_are_opt_in() {
    let plain = json(&finorder(&["--format", "json", "verify", "lemma24"]));
    assert!(plain.get("elapsed_ms").is_none());
    let timed = json(&finorder(&["--format", "json", "--timings", "verify", "lemma24"]));
    assert!(timed["elapsed_ms"].is_number());
    assert_eq!(plain["config_hash"], timed["config_hash"]);
}
