use std::process::{Command, Output};

use serde_json::Value;

fn fplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fplab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn cbeta_vanishes_at_fundamental_exponent() {
    let out = fplab(&["cbeta", "--beta", "2", "--N", "3", "--s", "0.5", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["c_beta"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn root_reports_numeric_exponent() {
    let out = fplab(&["root", "--N", "4", "--s", "0.3", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["beta_star_numeric"].as_f64().unwrap() - 1.55).abs() < 1e-6);
}

#[test]
fn phi_outside_inner_ball_uses_inversion() {
    let out = fplab(&["phi", "--rho", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out)["phi"].as_f64().unwrap();
    assert!((v - 4.0 * std::f64::consts::PI / 9.0).abs() < 1e-8);
    assert_eq!(fplab(&["phi", "--rho", "1"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fplab(&["cbeta", "--s", "1.5", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(fplab(&["root", "--frobnicate", "3"]).status.code(), Some(2));
    assert_eq!(fplab(&["nonsense"]).status.code(), Some(2));
    assert_eq!(fplab(&["cbeta"]).status.code(), Some(2));
    assert_eq!(fplab(&["root", "--config", "/nonexistent/fplab.conf"]).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# triple\nN = 4\ns = 0.3\np = 2.5 # overridden\nbeta = 1.2\n").unwrap();
    let conf = path.to_str().unwrap();
    let out = fplab(&["cbeta", "--config", conf, "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["params"]["N"], 4);
    assert_eq!(v["params"]["p"].as_f64(), Some(3.0));
    assert_eq!(v["beta"].as_f64(), Some(1.2));

    std::fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(fplab(&["root", "--config", conf]).status.code(), Some(2));
}

#[test]
fn apply_matches_power_constant() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("apply");
    let out = fplab(&[
        "apply", "--beta", "1.6", "--rmin", "0.5", "--rmax", "8", "--n", "5", "--out", stem.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["max_relative_difference"].as_f64().unwrap() < 1e-4);
    let csv = std::fs::read_to_string(dir.path().join("apply.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "r,pv,power_constant,est_error");
    assert_eq!(lines.len(), 6);
    assert!(!csv.contains('\r'));
}

#[test]
fn minimize_writes_profile_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("min");
    let out = fplab(&[
        "minimize", "--N", "3", "--s", "0.5", "--p", "2", "--rmin", "1e-3", "--rmax", "1e3", "--n", "400", "--out",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((v["result"]["tail_exponent"].as_f64().unwrap() - 2.0).abs() < 0.1);
    assert_eq!(v["result"]["converged"], true);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("min.json")).unwrap()).unwrap();
    assert_eq!(file, v);
    let csv = std::fs::read_to_string(dir.path().join("min.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("r,value"));
    assert_eq!(csv.lines().count(), 401);
}

#[test]
fn capacity_with_level_checks() {
    let out = fplab(&["capacity", "--radius", "1", "--rmin", "9.765625e-4", "--rmax", "1024", "--n", "401"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["result"]["i_value"].as_f64().unwrap() > 0.0);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert_eq!(fplab(&["capacity", "--radius", "5000"]).status.code(), Some(2));
}

#[test]
fn checks_are_seeded_and_thread_independent() {
    let run = |threads: &str, seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_fplab"))
            .args(["checks", "--p", "1.5", "--samples", "20000", "--seed", seed])
            .env("FPLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1", "5");
    let b = run("3", "5");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run("1", "6").stdout);
    assert_eq!(run("0", "5").status.code(), Some(2));
}

#[test]
fn failed_report_exits_one() {
    // a single optimizer iteration cannot meet the capacity and minimizer criteria
    let out = fplab(&["report", "--iters", "1", "--samples", "1000", "--rmin", "1e-2", "--rmax", "1e3", "--n", "100"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 10);
}
