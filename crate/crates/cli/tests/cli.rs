use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_competing-types"))
}

fn write(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const HALF_HALF: &str = r#"{
  "model": "multiplicative",
  "multiplicative": {"phi": "7/6", "alpha": 0},
  "p": [0, "1/2", "1/2", 1]
}"#;

#[test]
fn analyze_half_half_below_threshold() {
    let t = TempDir::new().unwrap();
    let cfg = write(t.path(), "c.json", HALF_HALF);
    let out = t.path().join("o");
    let o = run(&["analyze", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("analysis.json"));
    let classes: Vec<&str> = report["zeros"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| z["class"].as_str().unwrap())
        .collect();
    assert_eq!(classes, ["endpoint_unstable", "stable", "endpoint_unstable"]);
    let svg = fs::read_to_string(out.join("competition.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 3);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
}

#[test]
fn linear_config_is_degenerate() {
    let t = TempDir::new().unwrap();
    let cfg = write(
        t.path(),
        "c.json",
        r#"{"model": "plain", "plain": {"alpha": 0}, "p": [0, "1/3", "2/3", 1]}"#,
    );
    let out = t.path().join("o");
    let o = run(&["analyze", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(&out.join("analysis.json"))["degenerate"], Value::Bool(true));
}

#[test]
fn config_errors_exit_two() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("o");
    let out = out.to_str().unwrap();
    let phi0 = write(
        t.path(),
        "phi0.json",
        r#"{"model": "multiplicative", "multiplicative": {"phi": 0}, "p": [0, 1]}"#,
    );
    assert_eq!(code(&run(&["analyze", "--config", &phi0, "--out", out])), 2);
    let runs0 = write(
        t.path(),
        "runs0.json",
        r#"{"model": "plain", "plain": {"alpha": 0}, "p": [0, 1], "runs": 0, "steps": 10}"#,
    );
    assert_eq!(code(&run(&["ensemble", "--config", &runs0, "--out", out])), 2);
    let garbage = write(t.path(), "bad.json", "{ not json");
    assert_eq!(code(&run(&["simulate", "--config", &garbage, "--out", out])), 2);
    assert_eq!(code(&run(&["simulate", "--out", out])), 2);
}

#[test]
fn scan_finds_boundary_at_twenty_thirteenths() {
    let t = TempDir::new().unwrap();
    let cfg = write(
        t.path(),
        "c.json",
        r#"{"model": "multiplicative", "multiplicative": {"phi": 1}, "p": [0, 0, "9/10", 1],
            "scan": {"parameter": "phi", "from": 1.0, "to": 1.6, "step": 0.01}}"#,
    );
    let out = t.path().join("o");
    assert_eq!(code(&run(&["scan", "--config", &cfg, "--out", out.to_str().unwrap()])), 0);
    let csv = fs::read_to_string(out.join("boundaries.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(values.iter().any(|v| (v - 20.0 / 13.0).abs() < 0.01), "{csv}");
    assert!(fs::read_to_string(out.join("bifurcation.csv")).unwrap().starts_with("param,root,class,derivative\n"));
}

#[test]
fn verify_default_suite_exits_zero() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("o");
    let o = run(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let doc = read_json(&out.join("verify.json"));
    assert_eq!(doc["passed"], Value::Bool(true));
    assert!(doc["checks"].as_array().unwrap().len() >= 4);
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let t = TempDir::new().unwrap();
    let cfg = write(
        t.path(),
        "c.json",
        r#"{"model": "additive", "additive": {"alpha_red": 0, "alpha_blue": "1/2"}, "p": [0, "3/10", 1],
            "steps": 3000, "record_every": 100, "seed": 4}"#,
    );
    let a = t.path().join("a");
    let b = t.path().join("b");
    assert_eq!(code(&run(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()])), 0);
    let manifest = a.join("manifest.json");
    assert_eq!(
        code(&run(&["simulate", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()])),
        0
    );
    let first = fs::read(a.join("trajectory.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("trajectory.csv")).unwrap());
    let digest = &read_json(&manifest)["outputs"][0];
    assert_eq!(digest["file"], "trajectory.csv");
    assert_eq!(digest["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn flags_override_config_values() {
    let t = TempDir::new().unwrap();
    let cfg_out = t.path().join("from_config");
    let cfg = write(
        t.path(),
        "c.json",
        &format!(
            r#"{{"model": "plain", "plain": {{"alpha": 1}}, "p": [0, "1/2", 1], "steps": 500, "record_every": 50,
                "seed": 1, "format": "json", "out": {:?}}}"#,
            cfg_out.to_str().unwrap()
        ),
    );
    // Config alone: JSON output in the configured directory with seed 1.
    assert_eq!(code(&run(&["simulate", "--config", &cfg])), 0);
    assert!(cfg_out.join("trajectory.json").exists());
    assert_eq!(read_json(&cfg_out.join("manifest.json"))["master_seed"], 1);

    // Flags win for seed, format and out.
    let flag_out = t.path().join("from_flag");
    let o = run(&[
        "simulate", "--config", &cfg, "--seed", "9", "--format", "csv", "--out", flag_out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(flag_out.join("trajectory.csv").exists());
    let m = read_json(&flag_out.join("manifest.json"));
    assert_eq!(m["master_seed"], 9);
    assert_eq!(m["config"]["seed"], 9);
    assert_eq!(m["config"]["format"], "csv");

    // The same flags repeat the same trajectory.
    let again = t.path().join("again");
    run(&["simulate", "--config", &cfg, "--seed", "9", "--format", "csv", "--out", again.to_str().unwrap()]);
    assert_eq!(
        fs::read(flag_out.join("trajectory.csv")).unwrap(),
        fs::read(again.join("trajectory.csv")).unwrap()
    );
}

#[test]
fn ensemble_writes_counts_and_terminals() {
    let t = TempDir::new().unwrap();
    let cfg = write(
        t.path(),
        "c.json",
        r#"{"model": "multiplicative", "multiplicative": {"phi": 1}, "p": [0, 0, "9/10", 1],
            "runs": 40, "steps": 1000, "engine": "urn", "per_run_terminals": true}"#,
    );
    let out = t.path().join("o");
    let o = run(&["ensemble", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&out.join("ensemble.json"));
    let c = &doc["counts"];
    let total = c["red"].as_u64().unwrap() + c["blue"].as_u64().unwrap() + c["undecided"].as_u64().unwrap();
    assert_eq!(total, 40);
    assert_eq!(doc["per_run_terminals"].as_array().unwrap().len(), 40);
    assert_eq!(fs::read_to_string(out.join("terminals.csv")).unwrap().lines().count(), 41);
}
