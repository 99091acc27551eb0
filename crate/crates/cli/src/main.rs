mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use fplab_core::measure::inequality_suite;
use fplab_core::operator::apply_radial_pv_fn;
use fplab_core::power::{c_beta, find_root_beta};
use fplab_core::suite::run_suite;
use fplab_core::variational::{capacity_decay_check, decu1_check, minimize_quotient, solve_capacity};
use fplab_core::{make_log_grid, phi_extended};

use config::{parse_config, Cli, Command, RunConfig};
use output::{csv_row, to_json, with_extension, write_file};

enum Failure {
    /// Bad invocation or input: exit 2.
    Usage(String),
    /// A numerical check did not hold: exit 1.
    Check(String),
}

impl From<fplab_core::Error> for Failure {
    fn from(e: fplab_core::Error) -> Self {
        match e {
            fplab_core::Error::Divergent(_) | fplab_core::Error::Bracket(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("FPLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Failure::Usage(format!("FPLAB_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Failure::Usage("FPLAB_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

/// Prints `json` and, with `--out`, writes it to `<out>.json`.
fn emit(cfg: &RunConfig, json: &str) -> Result<(), Failure> {
    print!("{json}");
    if let Some(stem) = &cfg.out {
        write_file(&with_extension(stem, "json"), json)?;
    }
    Ok(())
}

fn emit_csv(cfg: &RunConfig, csv: &str) -> Result<(), Failure> {
    if let Some(stem) = &cfg.out {
        write_file(&with_extension(stem, "csv"), csv)?;
    }
    Ok(())
}

fn require(v: Option<f64>, flag: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this command")))
}

fn log_radii(cfg: &RunConfig) -> Result<Vec<f64>, Failure> {
    Ok(make_log_grid(cfg.rmin, cfg.rmax, cfg.n)?.radii().to_vec())
}

fn run(cmd: Command, cfg: &RunConfig) -> Outcome {
    let prm = &cfg.params;
    match cmd {
        Command::Phi => {
            let rho = require(cfg.rho, "rho")?;
            let v = phi_extended(rho, prm, &cfg.quad)?;
            emit(cfg, &to_json(&json!({"params": prm, "rho": rho, "phi": v})))?;
            Ok(true)
        }
        Command::Cbeta => {
            let beta = require(cfg.beta, "beta")?;
            let v = c_beta(beta, prm, &cfg.quad)?;
            emit(cfg, &to_json(&json!({"params": prm, "beta": beta, "c_beta": v})))?;
            Ok(true)
        }
        Command::Root => {
            let root = find_root_beta(prm, &cfg.quad, 1e-9)?;
            emit(
                cfg,
                &to_json(&json!({
                    "params": prm,
                    "beta_star_numeric": root,
                    "beta_star": prm.beta_star,
                    "abs_error": (root - prm.beta_star).abs(),
                })),
            )?;
            Ok((root - prm.beta_star).abs() <= 1e-4)
        }
        Command::Apply => {
            let beta = require(cfg.beta, "beta")?;
            let c = c_beta(beta, prm, &cfg.quad)?;
            let radii = log_radii(cfg)?;
            let u = move |r: f64| r.powf(-beta);
            let mut csv = String::from("r,pv,power_constant,est_error\n");
            let mut worst = 0.0f64;
            for &r in &radii {
                let pv = apply_radial_pv_fn(&u, r, prm, &cfg.quad)?;
                let exact = c * r.powf(-beta * (prm.p - 1.0) - prm.sp);
                if exact != 0.0 {
                    worst = worst.max(((pv.value - exact) / exact).abs());
                }
                csv.push_str(&csv_row(&[r, pv.value, exact, pv.est_error]));
            }
            emit_csv(cfg, &csv)?;
            emit(
                cfg,
                &to_json(&json!({"params": prm, "beta": beta, "c_beta": c, "radii": radii.len(), "max_relative_difference": worst})),
            )?;
            Ok(true)
        }
        Command::Minimize => {
            let grid = make_log_grid(cfg.rmin, cfg.rmax, cfg.n)?;
            let res = minimize_quotient(prm, &grid, &cfg.quad, &cfg.minimize)?;
            emit_csv(cfg, &res.profile.to_csv())?;
            emit(
                cfg,
                &to_json(&json!({
                    "params": prm,
                    "grid": {"rmin": cfg.rmin, "rmax": cfg.rmax, "n": cfg.n},
                    "options": cfg.minimize,
                    "result": res.summary(prm),
                })),
            )?;
            Ok(true)
        }
        Command::Capacity => {
            let grid = make_log_grid(cfg.rmin, cfg.rmax, cfg.n)?;
            let cap = solve_capacity(prm, &grid, cfg.radius, &cfg.quad, &cfg.minimize)?;
            let mut body = json!({
                "params": prm,
                "grid": {"rmin": cfg.rmin, "rmax": cfg.rmax, "n": cfg.n},
                "result": cap.summary(),
            });
            let mut ok = true;
            if cap.r == 1.0 {
                let radii: Vec<f64> = grid
                    .radii()
                    .iter()
                    .copied()
                    .filter(|r| (2.0..=50.0).contains(r))
                    .collect();
                if !radii.is_empty() {
                    let decay = capacity_decay_check(&cap, &radii, prm, 0.05)?;
                    let level = decu1_check(&cap, &radii, prm, 0.05)?;
                    ok = decay.passed && level.passed;
                    body["checks"] = json!([decay, level]);
                }
            }
            emit_csv(cfg, &cap.profile.to_csv())?;
            emit(cfg, &to_json(&body))?;
            Ok(ok)
        }
        Command::Checks => {
            let reps = inequality_suite(prm.p, cfg.samples, cfg.seed)?;
            let ok = reps.iter().all(|r| r.passed);
            emit(
                cfg,
                &to_json(&json!({"p": prm.p, "samples": cfg.samples, "seed": cfg.seed, "passed": ok, "checks": reps})),
            )?;
            Ok(ok)
        }
        Command::Report => {
            let report = run_suite(&cfg.suite())?;
            for c in &report.criteria {
                eprintln!("{}", c.line());
            }
            emit(cfg, &to_json(&report))?;
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = configure_threads()
        .and_then(|_| parse_config(cli.flags).map_err(|e| Failure::Usage(e.to_string())))
        .and_then(|cfg| run(cli.command, &cfg));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
