use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bacharach"));
    c.env_remove("BACHARACH_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn collinear(k: usize) -> PathBuf {
    let mut s = String::from("field 11\n");
    for t in 0..k {
        s.push_str(&format!("1, {t}, 0\n"));
    }
    tmp(&format!("collinear{k}.pts"), &s)
}

fn schema_for(verb: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(format!("{}.schema.json", verb.replace(' ', "-")));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Runs, checks the exit code and validates the JSON against its schema.
fn json(args: &[&str], code: i32) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let verb = doc["header"]["verb"].as_str().unwrap().to_string();
    let validator = jsonschema::validator_for(&schema_for(&verb)).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{verb}: {errors:?}");
    doc
}

#[test]
fn every_verb_matches_its_schema() {
    let five = collinear(5);
    let five = five.to_str().unwrap();
    let curve = collinear(8);
    let curve = curve.to_str().unwrap();
    json(&["cb", "check", "--points", five, "--d", "3"], 0);
    json(&["cb", "minimal", "--points", five, "--d", "3"], 0);
    json(&["cb", "curve", "--points", curve, "--e-max", "2"], 0);
    json(&["cb", "curve", "--points", curve, "--d", "3", "--e-max", "2"], 0);
    json(&["cb", "hunt", "--trials", "20", "--seed", "4"], 0);
    json(&["jets", "rank", "--points", five, "--d", "4"], 0);
    json(&["jets", "defect", "--points", five, "--d", "4"], 0);
    json(&["zeta", "value", "--n", "1", "--s", "2", "--prec", "5"], 0);
    json(&["zeta", "inverse", "--n", "2", "--s", "3", "--prec", "8", "--q", "2"], 0);
    json(&["zeta", "limit", "--prec", "12"], 0);
    json(&["classes", "wk", "--space", "P1", "--k", "2"], 0);
    json(&["classes", "wk", "--space", "P1", "--k", "2", "--q", "3"], 0);
    json(&["classes", "wlambda", "--space", "P1", "--sizes", "2,2"], 0);
    json(&["classes", "interp", "--values", "2:4,3:9,4:16,5:25", "--degree-bound", "2"], 0);
    json(&["classes", "interp", "--values", "2:4,3:9,4:16,5:26", "--degree-bound", "2"], 1);
    json(&["classes", "propvw", "--n", "1", "--d", "3", "--q", "2", "--big-n", "2"], 0);
    json(&["census", "run", "--n", "2", "--d", "2", "--q", "2"], 0);
    json(&["census", "run", "--n", "2", "--d", "3", "--q", "3", "--sample", "200", "--seed", "9"], 0);
    json(&["census", "decay", "--n", "1", "--q", "2", "--d-min", "2", "--d-max", "6"], 0);
    json(&["psi", "--n", "2", "--e", "1", "--d", "10", "--l-max", "4"], 0);
}

#[test]
fn documented_examples() {
    let doc = json(&["cb", "check", "--points", collinear(5).to_str().unwrap(), "--d", "3"], 0);
    assert_eq!(doc["result"]["is_cb"], Value::Bool(true));
    let doc = json(&["cb", "check", "--points", collinear(4).to_str().unwrap(), "--d", "3"], 1);
    assert_eq!(doc["result"]["is_cb"], Value::Bool(false));
    let doc = json(&["zeta", "inverse", "--n", "2", "--s", "3", "--prec", "8", "--q", "2"], 0);
    let coeffs: Vec<i64> = serde_json::from_value(doc["result"]["coefficients"].clone()).unwrap();
    assert_eq!(coeffs, vec![1, -1, -1, 0, 1, 1, -1, 0, 0]);
    assert_eq!(doc["result"]["specialization"]["value"], "21/64");
    let doc = json(&["psi", "--n", "2", "--e", "1", "--d", "10", "--l-max", "1"], 0);
    assert_eq!(doc["result"]["values"][0][1], 6);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["census", "run", "--n", "2", "--d", "2"]).status.code(), Some(2));
    assert_eq!(run(&["census", "run", "--n", "2", "--d", "2", "--q", "2", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(run(&["census", "run", "--n", "2", "--d", "6", "--q", "5"]).status.code(), Some(2));
    assert_eq!(run(&["census", "run", "--n", "7", "--d", "2", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["classes", "wk", "--space", "P1", "--k", "2", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["cb", "check", "--points", "/nonexistent.pts", "--d", "2"]).status.code(), Some(2));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_file_overrides_flags() {
    let cfg = tmp("override.json", r#"{"seed": 7, "format": "csv", "params": {"prec": 3}}"#);
    let out = run(&["zeta", "inverse", "--n", "2", "--s", "3", "--prec", "8", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# bacharach "));
    assert!(text.contains("\"seed\":7"));
    assert!(text.ends_with("j,coeff\n0,1\n1,-1\n2,-1\n3,0\n"), "{text}");
    let bad = tmp("bad.json", r#"{"params": {"nope": 1}}"#);
    let out = run(&["zeta", "limit", "--prec", "4", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_and_text_format() {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("limit.txt");
    let out = run(&["zeta", "limit", "--prec", "12", "--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("coefficients: [1,-1,-1,0,0,1,0,1,0,0,0,0,-1]"), "{text}");
}

#[test]
fn output_is_independent_of_worker_count() {
    let runs: Vec<(&[&str], &str)> = vec![
        (&["census", "run", "--n", "2", "--d", "3", "--q", "3", "--sample", "3000", "--seed", "11"], "census"),
        (&["cb", "hunt", "--trials", "40", "--seed", "2"], "hunt"),
    ];
    for (args, label) in runs {
        let outputs: Vec<Vec<u8>> = ["1", "4", "8"]
            .iter()
            .map(|w| {
                let out = bin().args(args).env("BACHARACH_WORKERS", w).output().unwrap();
                assert_eq!(out.status.code(), Some(0), "{label}");
                out.stdout
            })
            .collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{label}");
        let flag = bin().args(args).args(["--workers", "3"]).output().unwrap();
        assert_eq!(flag.stdout, outputs[0], "{label}");
    }
}
