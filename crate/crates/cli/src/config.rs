//! Run configuration: flags merged over an optional `key = value` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fplab_core::suite::SuiteConfig;
use fplab_core::variational::MinimizeOptions;
use fplab_core::{validate_params, Parameters, QuadratureSpec};

#[derive(Debug, Parser)]
#[command(name = "fplab", version, about = "Radial numerics for the fractional p-Laplacian")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Angular kernel Φ(ρ) at --rho (ρ > 1 through the inversion identity)
    Phi,
    /// Power constant C(β) at --beta
    Cbeta,
    /// Numerical root of C(β) against (N - sp)/(p - 1)
    Root,
    /// Operator on r^{-β} at log-spaced radii, by PV quadrature and by C(β)
    Apply,
    /// Minimize the Sobolev quotient; profile CSV and summary JSON
    Minimize,
    /// Capacitary potential of the ball of radius --radius
    Capacity,
    /// Seeded J_p inequality suite at --p
    Checks,
    /// Full acceptance suite as one JSON object
    Report,
}

/// Every flag is optional so that a config file can supply it.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long = "N", global = true, allow_negative_numbers = true)]
    pub n_dim: Option<i64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    #[arg(long, global = true)]
    pub rmin: Option<f64>,
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Quadrature panels per smooth piece
    #[arg(long, global = true)]
    pub panels: Option<usize>,
    /// Optimizer stopping tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// Output path stem; `.json` and `.csv` files are written next to it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Samples per inequality
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// `key = value` file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Usage(m) => write!(f, "{m}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> ConfigError {
    ConfigError::Usage(msg.into())
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| usage(format!("invalid value for {key}: {v:?}")))
}

impl Flags {
    /// Fill unset flags from the file map, rejecting unknown keys.
    fn merge_file(&mut self, map: &BTreeMap<String, String>) -> Result<(), ConfigError> {
        for (k, v) in map {
            match k.as_str() {
                "N" => self.n_dim = self.n_dim.or(Some(parse(k, v)?)),
                "s" => self.s = self.s.or(Some(parse(k, v)?)),
                "p" => self.p = self.p.or(Some(parse(k, v)?)),
                "beta" => self.beta = self.beta.or(Some(parse(k, v)?)),
                "rho" => self.rho = self.rho.or(Some(parse(k, v)?)),
                "radius" => self.radius = self.radius.or(Some(parse(k, v)?)),
                "rmin" => self.rmin = self.rmin.or(Some(parse(k, v)?)),
                "rmax" => self.rmax = self.rmax.or(Some(parse(k, v)?)),
                "n" => self.n = self.n.or(Some(parse(k, v)?)),
                "panels" => self.panels = self.panels.or(Some(parse(k, v)?)),
                "tol" => self.tol = self.tol.or(Some(parse(k, v)?)),
                "iters" => self.iters = self.iters.or(Some(parse(k, v)?)),
                "seed" => self.seed = self.seed.or(Some(parse(k, v)?)),
                "samples" => self.samples = self.samples.or(Some(parse(k, v)?)),
                "out" => self.out = self.out.clone().or(Some(PathBuf::from(v))),
                _ => return Err(usage(format!("unknown config key {k:?}"))),
            }
        }
        Ok(())
    }
}

/// Fully merged configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Parameters,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub radius: f64,
    pub rmin: f64,
    pub rmax: f64,
    pub n: usize,
    pub quad: QuadratureSpec,
    pub minimize: MinimizeOptions,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
    /// Grid extents given explicitly (by flag or file) rather than defaulted.
    pub grid_given: (bool, bool, bool),
}

pub fn parse_config(mut flags: Flags) -> Result<RunConfig, ConfigError> {
    if let Some(path) = flags.config.clone() {
        let map = read_config_file(&path)?;
        flags.merge_file(&map)?;
    }
    let params = validate_params(flags.n_dim.unwrap_or(3), flags.s.unwrap_or(0.5), flags.p.unwrap_or(2.0))
        .map_err(|e| usage(e.to_string()))?;
    let mut quad = QuadratureSpec::default();
    if let Some(panels) = flags.panels {
        quad.panels = panels;
    }
    quad.validate().map_err(|e| usage(e.to_string()))?;
    let defaults = MinimizeOptions::default();
    let minimize = MinimizeOptions {
        max_iters: flags.iters.unwrap_or(defaults.max_iters),
        tol: flags.tol.unwrap_or(defaults.tol),
        ..defaults
    };
    if !(minimize.tol > 0.0) || minimize.max_iters == 0 {
        return Err(usage("--tol must be positive and --iters at least 1"));
    }
    Ok(RunConfig {
        params,
        beta: flags.beta,
        rho: flags.rho,
        radius: flags.radius.unwrap_or(1.0),
        rmin: flags.rmin.unwrap_or(1e-3),
        rmax: flags.rmax.unwrap_or(1e3),
        n: flags.n.unwrap_or(400),
        quad,
        minimize,
        out: flags.out,
        seed: flags.seed.unwrap_or(SuiteConfig::default().seed),
        samples: flags.samples.unwrap_or(100_000),
        grid_given: (flags.rmin.is_some(), flags.rmax.is_some(), flags.n.is_some()),
    })
}

impl RunConfig {
    /// Acceptance configuration with this run's overrides applied.
    pub fn suite(&self) -> SuiteConfig {
        let mut cfg = SuiteConfig::default();
        cfg.quad = self.quad;
        cfg.minimize.max_iters = self.minimize.max_iters;
        cfg.minimize.tol = self.minimize.tol;
        if self.grid_given.0 {
            cfg.min_rmin = self.rmin;
        }
        if self.grid_given.1 {
            cfg.min_rmax = self.rmax;
            cfg.minimize.fit_window = None;
        }
        if self.grid_given.2 {
            cfg.min_n = self.n;
        }
        cfg.seed = self.seed;
        cfg.samples = self.samples;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing() {
        let m = parse_config_text("# header\nN = 4\n s=0.3 # trailing\n\np = 3\n").unwrap();
        assert_eq!(m["N"], "4");
        assert_eq!(m["s"], "0.3");
        assert_eq!(m.len(), 3);
        assert!(parse_config_text("N 4").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut f = Flags {
            p: Some(2.5),
            ..Flags::default()
        };
        let m = parse_config_text("p = 3\ns = 0.4").unwrap();
        f.merge_file(&m).unwrap();
        assert_eq!(f.p, Some(2.5));
        assert_eq!(f.s, Some(0.4));
        assert!(f.merge_file(&parse_config_text("colour = red").unwrap()).is_err());
    }

    #[test]
    fn invalid_triple_is_usage_error() {
        let f = Flags {
            s: Some(1.5),
            ..Flags::default()
        };
        assert!(parse_config(f).is_err());
    }
}
