//! Acceptance gate: criteria 1–10 through the library, criterion 11 by
//! running `fplab report` twice. One line per criterion; exits non-zero if
//! any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use fplab_core::suite::{run_suite, SuiteConfig};

fn determinism() -> (bool, String) {
    let dir = tempfile::tempdir().expect("temp dir");
    let run = |tag: &str, threads: &str| {
        let stem = dir.path().join(tag);
        let out = Command::new(env!("CARGO_BIN_EXE_fplab"))
            .args(["report", "--out", stem.to_str().unwrap()])
            .env("FPLAB_THREADS", threads)
            .output()
            .expect("binary runs");
        let file = std::fs::read(dir.path().join(format!("{tag}.json"))).unwrap_or_default();
        (out.status.code(), out.stdout, file)
    };
    let a = run("first", "1");
    let b = run("second", "4");
    let identical = a.1 == b.1 && a.2 == b.2 && !a.2.is_empty();
    (
        identical,
        format!(
            "exit codes {:?}/{:?}, {} bytes, 1 vs 4 worker threads",
            a.0,
            b.0,
            a.2.len()
        ),
    )
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let report = run_suite(&cfg).expect("suite runs");
    let mut all = true;
    for c in &report.criteria {
        println!("{}", c.line());
        if !(c.passed && c.within_budget()) {
            all = false;
            println!("{}", serde_json::to_string_pretty(&c.detail).unwrap());
        }
    }
    let t = Instant::now();
    let (same, note) = determinism();
    println!(
        "[{}] criterion 11 {:<36} {:>8.2}s ({note})",
        if same { "PASS" } else { "FAIL" },
        "determinism of report",
        t.elapsed().as_secs_f64()
    );
    all &= same;
    println!("acceptance: {}", if all { "all criteria passed" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
