use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn hoover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoover"))
        .args(args)
        .env_remove("INEQ_REL_TOL")
        .env_remove("INEQ_SERIES_TOL")
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = hoover(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(args: &[&str]) -> (i32, Value) {
    let out = hoover(args);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    (out.status.code().unwrap(), err)
}

#[test]
fn index_gamma_exponential() {
    let v = json_ok(&["index", "--dist", "gamma:alpha=1,rate=1"]);
    assert!((v["H"].as_f64().unwrap() - 0.367_879_441_171).abs() < 1e-12);
    assert_eq!(v["method"], "closed_form");
}

#[test]
fn estimate_two_point() {
    let v = json_ok(&["estimate", "--sample", "0,2"]);
    assert_eq!(v["hoover_hat"].as_f64().unwrap(), 0.5);
    assert_eq!(v["n"], 2);
}

#[test]
fn bias_gamma_n2() {
    let v = json_ok(&["bias", "--dist", "gamma:alpha=1,rate=1", "--n", "2"]);
    assert!((v["bias"].as_f64().unwrap() + 0.117_879_441_171).abs() < 1e-11);
    assert!(v["lower_bound"].as_f64().unwrap() < v["bias"].as_f64().unwrap());
}

#[test]
fn expectation_discrete() {
    let v = json_ok(&["expectation", "--dist", "poisson:lambda=1", "--n", "2"]);
    assert!((v["expected_hoover_hat"].as_f64().unwrap() - 0.274_364_354_085).abs() < 1e-11);
    assert_eq!(v["method"], "poisson_tilted_lattice");
    let v = json_ok(&["expectation", "--dist", "geometric:p=0.5", "--n", "2"]);
    assert!((v["expected_hoover_hat"].as_f64().unwrap() - 0.284_331_634_021).abs() < 1e-11);
}

#[test]
fn correct_from_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "0.4\n1.3\n2.9\n0.7\n1.8\n0.2\n3.5\n1.1").unwrap();
    let v = json_ok(&["correct", "--sample", f.path().to_str().unwrap(), "--family", "gamma"]);
    let raw = v["raw"].as_f64().unwrap();
    let corr = v["corrected"].as_f64().unwrap();
    let b = v["bias_estimate"].as_f64().unwrap();
    assert!(b < 0.0 && corr > raw);
    assert!((raw - b - corr).abs() < 1e-11);
    assert!(v["fitted"].as_str().unwrap().starts_with("gamma:alpha="));
}

#[test]
fn rate_note_is_echoed() {
    let v = json_ok(&["bias", "--dist", "gamma:alpha=1,rate=4", "--n", "2"]);
    assert!(v["notes"][0].as_str().unwrap().contains("scale invariant"));
    assert!((v["bias"].as_f64().unwrap() + 0.117_879_441_171).abs() < 1e-11);
}

#[test]
fn plain_and_csv_formats() {
    let out = hoover(&["--format", "plain", "index", "--dist", "geometric:p=0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "H: 0.5"));
    let out = hoover(&["index", "--dist", "poisson:lambda=1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "spec,H,err_est,method");
    assert!(lines[1].starts_with("poisson:lambda=1,0.367879441171,"));
}

#[test]
fn distinct_exit_codes() {
    let (code, err) = error_of(&["index", "--dist", "gamma:beta=2"]);
    assert_eq!(code, 3);
    assert_eq!(err["error"]["kind"], "invalid_spec");
    let (code, _) = error_of(&["estimate", "--sample", "-1,2"]);
    assert_eq!(code, 4);
    let (code, _) = error_of(&["estimate", "--sample", "1,abc"]);
    assert_eq!(code, 4);
    let (code, _) = error_of(&["bias", "--dist", "poisson:lambda=2", "--n", "1"]);
    assert_eq!(code, 5);
    let (code, _) = error_of(&["correct", "--sample", "3,3,3", "--family", "gamma"]);
    assert_eq!(code, 7);
    let (code, _) = error_of(&["correct", "--sample", "1.5,2", "--family", "poisson"]);
    assert_eq!(code, 4);
    let (code, _) = error_of(&["estimate", "--sample", "no_such_file.txt"]);
    assert_eq!(code, 9);
}

#[test]
fn tolerance_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_hoover"))
        .args(["expectation", "--dist", "gamma:alpha=2", "--n", "10"])
        .env("INEQ_REL_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(8));
    let out = Command::new(env!("CARGO_BIN_EXE_hoover"))
        .args(["expectation", "--dist", "gamma:alpha=2", "--n", "10"])
        .env("INEQ_REL_TOL", "1e-6")
        .env("INEQ_SERIES_TOL", "1e-10")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn simulate_csv_and_json() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(
        cfg,
        r#"{{"specs": ["gamma:alpha=1", "geometric:p=0.5"], "sample_sizes": [10, 20], "replications": 40, "seed": 3}}"#
    )
    .unwrap();
    let path = cfg.path().to_str().unwrap();
    let out = hoover(&["simulate", "--config", path, "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "family,params,n,R,seed,H_true,relbias_raw,relbias_corr,rmse_raw,rmse_corr,se_relbias_raw,se_relbias_corr,failures"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("gamma,\"alpha=1,rate=1\",10,40,3,0.367879441171,"));

    let v = json_ok(&["simulate", "--config", path]);
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
    assert!(v["cells"][0]["interpolation"]["knots"].as_u64().unwrap() >= 200);
    let again = json_ok(&["simulate", "--config", path]);
    assert_eq!(v, again);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(
        bad,
        r#"{{"specs": ["gamma:alpha=1"], "sample_sizes": [1], "replications": 5, "seed": 0}}"#
    )
    .unwrap();
    let (code, _) = error_of(&["simulate", "--config", bad.path().to_str().unwrap()]);
    assert_eq!(code, 8);
}

#[test]
fn oracle_agrees_with_quadrature() {
    let v = json_ok(&["oracle", "--alpha", "1", "--n", "5", "--reps", "200000", "--seed", "1"]);
    assert!(v["z_score"].as_f64().unwrap().abs() < 5.0);
    assert_eq!(v["reps"], 200000);
}
