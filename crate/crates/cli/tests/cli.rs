//! End-to-end runs of the `rigidity` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn rigidity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity"))
        .args(args)
        .env_remove("RIGIDITY_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

const DIAGONAL: &[&str] = &["--case", "diagonal", "--n", "2", "--q0", "1", "--p", "3", "--q", "2"];

fn with(verb: &str, base: &[&str], extra: &[&str]) -> Vec<String> {
    std::iter::once(verb)
        .chain(base.iter().copied())
        .chain(extra.iter().copied())
        .map(String::from)
        .collect()
}

fn run_owned(args: Vec<String>) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    rigidity(&refs)
}

#[test]
fn decompose_diagonal_reports_two_standard_copies() {
    let out = run_owned(with("decompose", DIAGONAL, &[]));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["decomposition"]["d"]["1"], 2);
    assert_eq!(v["decomposition"]["dim_g"], 24);
    assert_eq!(v["tool"]["name"], "rigidity");
    assert_eq!(v["spec"]["p"], 3);
}

#[test]
fn decompose_satake_and_ihara() {
    let v = json(&rigidity(&["decompose", "--case", "satake", "--n", "2"]));
    assert_eq!(v["decomposition"]["d"], serde_json::json!({"2": 1}));
    let labels: Vec<&str> = v["decomposition"]["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["label"].as_str().unwrap())
        .collect();
    assert!(labels.contains(&"sym_power(2)"));

    let v = json(&rigidity(&["decompose", "--case", "ihara-so", "--n", "3"]));
    assert!(v["decomposition"]["d"].as_object().unwrap().is_empty());
}

#[test]
fn certify_diagonal_at_gamma_one() {
    let out = run_owned(with("certify", DIAGONAL, &["--gamma", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["outcome"], "rigid_by_certificate");
    assert_eq!(v["search"]["status"], "certificate");
    assert_eq!(v["explicit_z"]["gamma"], 1.0);
    assert!(v["explicit_z"]["margins"]["1"].as_f64().unwrap() > 0.0);
    // complex entries are [re, im] pairs
    assert_eq!(v["explicit_z"]["z"][0][0].as_array().unwrap().len(), 2);
}

#[test]
fn certify_ihara_cases() {
    let out = rigidity(&["certify", "--case", "ihara-sostar", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["outcome"], "rigid_by_vanishing");
    assert!(v.get("search").is_none());

    let v = json(&rigidity(&["certify", "--case", "ihara-so", "--n", "2"]));
    let flags = v["verdict"]["flags"].as_array().unwrap();
    assert_eq!(flags.len(), 1);
    assert!(flags[0].as_str().unwrap().contains("dual"));
}

#[test]
fn invalid_specs_exit_one() {
    for args in [
        vec!["decompose", "--case", "diagonal", "--n", "2", "--q0", "1", "--p", "1", "--q", "2"],
        vec!["certify", "--case", "satake", "--n", "1"],
        vec!["certify", "--case", "satake"],
        vec!["decompose", "--case", "unknown", "--n", "2"],
    ] {
        let out = rigidity(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    }
}

#[test]
fn gamma_outside_the_window_is_invalid() {
    let out = run_owned(with("certify", DIAGONAL, &["--gamma", "100"]));
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn reports_are_deterministic() {
    let a = run_owned(with("certify", DIAGONAL, &[]));
    let b = run_owned(with("certify", DIAGONAL, &[]));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_same_document() {
    let dir = std::env::temp_dir().join(format!("rigidity-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("satake.json");
    let p = path.to_str().unwrap();
    let out = rigidity(&["decompose", "--case", "satake", "--n", "2", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, rigidity(&["decompose", "--case", "satake", "--n", "2"]).stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tolerance_from_environment_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_rigidity"))
        .args(["decompose", "--case", "satake", "--n", "2"])
        .env("RIGIDITY_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerances"]["residual_tol"], 1e-9);
    let out = Command::new(env!("CARGO_BIN_EXE_rigidity"))
        .args(["decompose", "--case", "satake", "--n", "2", "--tol", "1e-8"])
        .env("RIGIDITY_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerances"]["residual_tol"], 1e-8);
}

#[test]
fn verify_paper_only_runs_one_criterion() {
    let out = rigidity(&["verify-paper", "--only", "satake"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[PASS] criterion  6 satake"), "{text}");
    assert!(text.contains("1/1 criteria passed"));
}

#[test]
fn verify_paper_with_an_over_tight_tolerance_fails() {
    let out = rigidity(&["verify-paper", "--only", "embedding", "--tol", "1e-15"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}
