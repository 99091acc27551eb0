//! The acceptance criteria as library calls, shared by the `report`
//! command and the acceptance tests.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::grid::make_log_grid;
use crate::kernel::homogeneity_defect;
use crate::measure::{
    decay_envelope_check, inequality_suite, lorentz_norm, radial_lemma_check, weak_lq_bound_check,
    weighted_identity_check,
};
use crate::operator::{apply_radial_pv_fn, apply_to_truncated_gamma, el_residual};
use crate::params::{validate_params, Parameters};
use crate::power::{beta_window, c_beta, c_beta_sweep, find_root_beta};
use crate::profile::{RadialProfile, TailPolicy};
use crate::quadrature::QuadratureSpec;
use crate::tail::fit_tail_exponent;
use crate::variational::{
    capacity_decay_check, decu1_check, minimize_quotient, solve_capacity, MinimizeOptions, MinimizerResult,
};

pub const ROOT_TRIPLES: [(i64, f64, f64); 3] = [(3, 0.5, 2.0), (4, 0.3, 3.0), (2, 0.75, 1.5)];
pub const CAPACITY_TRIPLES: [(i64, f64, f64); 5] =
    [(3, 0.5, 2.0), (3, 0.5, 2.5), (3, 0.5, 1.5), (4, 0.3, 3.0), (2, 0.75, 1.5)];
pub const MINIMIZER_TRIPLES: [(i64, f64, f64); 3] = [(3, 0.5, 2.0), (3, 0.5, 2.5), (3, 0.5, 1.5)];
pub const INEQUALITY_EXPONENTS: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub quad: QuadratureSpec,
    pub minimize: MinimizeOptions,
    pub min_rmin: f64,
    pub min_rmax: f64,
    pub min_n: usize,
    pub cap_rmin: f64,
    pub cap_rmax: f64,
    pub cap_n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            quad: QuadratureSpec::default(),
            minimize: MinimizeOptions {
                fit_window: Some((10.0, 100.0)),
                ..MinimizeOptions::default()
            },
            min_rmin: 1e-3,
            min_rmax: 1e3,
            min_n: 400,
            cap_rmin: 2f64.powi(-10),
            cap_rmax: 2f64.powi(10),
            cap_n: 401,
            samples: 100_000,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed: Duration,
    /// Runtime budget; exceeding it fails the criterion in the acceptance
    /// tests but is not part of the serialized report.
    #[serde(skip)]
    pub budget: Duration,
}

impl Criterion {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn line(&self) -> String {
        let ok = self.passed && self.within_budget();
        format!(
            "[{}] criterion {:>2} {:<36} {:>8.2}s (budget {}s)",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

fn timed<F: FnOnce() -> Result<(bool, Value)>>(id: u32, name: &str, budget: u64, f: F) -> Criterion {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    Criterion {
        id,
        name: name.to_string(),
        passed,
        detail,
        elapsed: t.elapsed(),
        budget: Duration::from_secs(budget),
    }
}

fn triple(t: (i64, f64, f64)) -> Result<Parameters> {
    validate_params(t.0, t.1, t.2)
}

fn log_points(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// `find_root_beta` recovers `(N-sp)/(p-1)` and `C` vanishes there.
pub fn root_criterion(cfg: &SuiteConfig) -> Criterion {
    timed(1, "fundamental-solution root", 30, || {
        let mut rows = Vec::new();
        let mut ok = true;
        for t in ROOT_TRIPLES {
            let prm = triple(t)?;
            let root = find_root_beta(&prm, &cfg.quad, 1e-9)?;
            let at = c_beta(prm.beta_star, &prm, &cfg.quad)?;
            let pass = (root - prm.beta_star).abs() <= 1e-4 && at.abs() <= 1e-10;
            ok &= pass;
            rows.push(json!({"triple": t, "beta_numeric": root, "beta_star": prm.beta_star, "c_at_beta_star": at, "passed": pass}));
        }
        Ok((ok, json!(rows)))
    })
}

/// `sign C(β) = sign(β* - β)` on 20 exponents across the admissible window.
pub fn sign_law_criterion(cfg: &SuiteConfig) -> Criterion {
    timed(2, "sign law of C(beta)", 30, || {
        let mut rows = Vec::new();
        let mut ok = true;
        for t in ROOT_TRIPLES {
            let prm = triple(t)?;
            let (lo, hi) = beta_window(&prm);
            let betas: Vec<f64> = (0..20).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / 20.0).collect();
            let values = c_beta_sweep(&betas, &prm, &cfg.quad)?;
            let exceptions = betas
                .iter()
                .zip(&values)
                .filter(|(b, c)| c.signum() != (prm.beta_star - **b).signum() || **c == 0.0)
                .count();
            ok &= exceptions == 0;
            rows.push(json!({"triple": t, "betas": betas, "c_beta": values, "exceptions": exceptions}));
        }
        Ok((ok, json!(rows)))
    })
}

/// Principal-value quadrature on `r^{-β}` against `C(β) r^{-β(p-1)-sp}`.
pub fn operator_oracle_criterion(cfg: &SuiteConfig) -> Criterion {
    timed(3, "operator oracle equivalence", 60, || {
        let prm = validate_params(3, 0.5, 2.0)?;
        let mut worst = 0.0f64;
        let mut rows = Vec::new();
        for beta in [1.2, 1.6, 2.4] {
            let c = c_beta(beta, &prm, &cfg.quad)?;
            for r in [0.5, 2.0, 8.0] {
                let u = move |x: f64| x.powf(-beta);
                let pv = apply_radial_pv_fn(&u, r, &prm, &cfg.quad)?.value;
                let exact = c * r.powf(-beta * (prm.p - 1.0) - prm.sp);
                let rel = ((pv - exact) / exact).abs();
                worst = worst.max(rel);
                rows.push(json!({"beta": beta, "r": r, "pv": pv, "power_constant": exact, "relative_error": rel}));
            }
        }
        Ok((worst <= 0.01, json!({"max_relative_error": worst, "points": rows})))
    })
}

/// `r^{N+sp} (-Δ_p)^s Γ̃(r) → 16π/3` at `(3, 1/2, 2)`.
pub fn truncated_power_criterion(cfg: &SuiteConfig) -> Criterion {
    timed(4, "truncated-power asymptote", 60, || {
        let prm = validate_params(3, 0.5, 2.0)?;
        let k = prm.kernel_order();
        let limit = 16.0 * PI / 3.0;
        let radii = log_points(2.0, 100.0, 41);
        let scaled: Vec<f64> = radii
            .iter()
            .map(|&r| Ok(apply_to_truncated_gamma(r, &prm, &cfg.quad)?.value * r.powf(k)))
            .collect::<Result<_>>()?;
        let at100 = scaled[scaled.len() - 1];
        let rel = ((at100 - limit) / limit).abs();
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().cloned().fold(0.0, f64::max);
        // band: positive and within a factor 10 of the limit
        let band = lo > 0.0 && hi <= 10.0 * limit && lo >= limit / 10.0;
        Ok((
            rel <= 0.02 && band,
            json!({"limit": limit, "value_at_100": at100, "relative_error": rel, "band": [lo, hi]}),
        ))
    })
}

/// `I(2)/I(1) = 2^{N-sp}`, `u_1(R) R^{β*} ≤ p^{1/(p-1)}`, the level
/// inequality for `u_1`, and exact saturation of the obstacle.
pub fn capacity_criterion(cfg: &SuiteConfig) -> Criterion {
    let budget = 300 * CAPACITY_TRIPLES.len() as u64;
    timed(5, "capacity scaling and decay", budget, || {
        let grid = make_log_grid(cfg.cap_rmin, cfg.cap_rmax, cfg.cap_n)?;
        let radii = log_points(2.0, 50.0, 41);
        let mut rows = Vec::new();
        let mut ok = true;
        for t in CAPACITY_TRIPLES {
            let prm = triple(t)?;
            let c1 = solve_capacity(&prm, &grid, 1.0, &cfg.quad, &cfg.minimize)?;
            let c2 = solve_capacity(&prm, &grid, 2.0, &cfg.quad, &cfg.minimize)?;
            let ratio = c2.i_value / c1.i_value;
            let target = 2f64.powf(prm.dim() - prm.sp);
            let scaling = ((ratio - target) / target).abs() <= 0.05;
            let decay = capacity_decay_check(&c1, &radii, &prm, 0.05)?;
            let level = decu1_check(&c1, &radii, &prm, 0.05)?;
            let saturated = |c: &crate::variational::CapacityResult| {
                grid.radii()
                    .iter()
                    .zip(c.profile.values())
                    .filter(|(r, _)| **r <= c.r * (1.0 + 1e-12))
                    .all(|(_, v)| *v == 1.0)
            };
            let saturation = saturated(&c1) && saturated(&c2);
            let pass = scaling && decay.passed && level.passed && saturation;
            ok &= pass;
            rows.push(json!({
                "triple": t,
                "i1": c1.i_value,
                "i2": c2.i_value,
                "ratio": ratio,
                "target": target,
                "iterations": [c1.iterations, c2.iterations],
                "converged": [c1.converged, c2.converged],
                "decay": decay,
                "level_inequality": level,
                "saturation_exact": saturation,
                "passed": pass,
            }));
        }
        Ok((ok, json!(rows)))
    })
}

/// Minimizers for [`MINIMIZER_TRIPLES`], computed once and shared by the
/// criteria that inspect them.
pub struct MinimizerRuns {
    pub runs: Vec<(Parameters, Result<MinimizerResult>, Duration)>,
}

impl MinimizerRuns {
    pub fn compute(cfg: &SuiteConfig) -> Result<Self> {
        let grid = make_log_grid(cfg.min_rmin, cfg.min_rmax, cfg.min_n)?;
        let mut runs = Vec::new();
        for t in MINIMIZER_TRIPLES {
            let prm = triple(t)?;
            let start = Instant::now();
            let res = minimize_quotient(&prm, &grid, &cfg.quad, &cfg.minimize);
            runs.push((prm, res, start.elapsed()));
        }
        Ok(MinimizerRuns { runs })
    }

    fn get(&self, i: usize) -> Result<(&Parameters, &MinimizerResult)> {
        let (prm, res, _) = &self.runs[i];
        match res {
            Ok(r) => Ok((prm, r)),
            Err(e) => Err(e.clone()),
        }
    }
}

/// Largest relative deviation on `[0.1, 10]` of `u` from the normalized
/// bubble `c_λ (1 + (r/λ)²)^{-1}`, `c_λ = λ^{-1} (π²/4)^{-1/3}`, minimized
/// over `λ` by golden-section search in `log λ`.
pub fn bubble_shape_error(u: &RadialProfile) -> (f64, f64) {
    let c0 = (PI * PI / 4.0).powf(-1.0 / 3.0);
    let pts: Vec<(f64, f64)> = u
        .grid()
        .radii()
        .iter()
        .zip(u.values())
        .filter(|(r, _)| **r >= 0.1 && **r <= 10.0)
        .map(|(r, v)| (*r, *v))
        .collect();
    let err = |ll: f64| {
        let lam = ll.exp();
        pts.iter()
            .map(|&(r, v)| {
                let b = c0 / lam / (1.0 + (r / lam).powi(2));
                ((v - b) / b).abs()
            })
            .fold(0.0, f64::max)
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (-(10f64.ln()), 10f64.ln());
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (err(x1), err(x2));
    while b - a > 1e-10 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = err(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = err(x2);
        }
    }
    let ll = 0.5 * (a + b);
    (ll.exp(), err(ll))
}

/// Tail exponents of the minimizers; bubble shape for `p = 2`.
pub fn minimizer_criterion(cfg: &SuiteConfig, runs: &MinimizerRuns) -> Criterion {
    let mut c = timed(6, "minimizer decay", 900 * MINIMIZER_TRIPLES.len() as u64, || {
        let mut rows = Vec::new();
        let mut ok = true;
        for (i, t) in MINIMIZER_TRIPLES.iter().enumerate() {
            let (prm, res) = runs.get(i)?;
            let window = cfg.minimize.fit_window.unwrap_or((cfg.min_rmax / 100.0, cfg.min_rmax / 10.0));
            let fit = fit_tail_exponent(&res.profile, window)?;
            let tol = if prm.p == 2.0 { 0.1 } else { 0.15 };
            let mut pass = (fit.exponent - prm.beta_star).abs() <= tol;
            let mut row = json!({
                "triple": t,
                "tail_exponent": fit.exponent,
                "beta_star": prm.beta_star,
                "tolerance": tol,
                "fit_window": window,
                "iterations": res.iterations,
                "converged": res.converged,
                "s_estimate": res.s_estimate,
            });
            if prm.p == 2.0 && prm.n == 3 && prm.sp == 1.0 {
                let (lambda, shape) = bubble_shape_error(&res.profile);
                pass &= res.converged && shape <= 0.05;
                row["shape_scale"] = json!(lambda);
                row["shape_max_relative_error"] = json!(shape);
            }
            row["passed"] = json!(pass);
            ok &= pass;
            rows.push(row);
        }
        Ok((ok, json!(rows)))
    });
    c.elapsed += runs.runs.iter().map(|r| r.2).sum::<Duration>();
    c
}

/// Euler–Lagrange residual of the `(3, 1/2, 2)` minimizer on `[0.5, 5]`.
pub fn euler_lagrange_criterion(cfg: &SuiteConfig, runs: &MinimizerRuns) -> Criterion {
    timed(7, "Euler-Lagrange residual", 300, || {
        let (prm, res) = runs.get(0)?;
        let radii = log_points(0.5, 5.0, 11);
        let r = el_residual(&res.profile, res.s_estimate, prm, &cfg.quad, &radii)?;
        let worst = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        Ok((
            worst <= 0.05,
            json!({"s_estimate": res.s_estimate, "radii": radii, "residuals": r, "max_abs": worst}),
        ))
    })
}

/// Weak-`L^{q0}` bound and decay envelope on each minimizer.
pub fn explicit_estimates_criterion(cfg: &SuiteConfig, runs: &MinimizerRuns) -> Criterion {
    timed(8, "explicit estimates on minimizer", 120, || {
        let mut rows = Vec::new();
        let mut ok = true;
        for (i, t) in MINIMIZER_TRIPLES.iter().enumerate() {
            let (prm, res) = runs.get(i)?;
            let weak = weak_lq_bound_check(&res.profile, prm, 0.05)?;
            let r_fit = cfg.minimize.fit_window.map_or(cfg.min_rmax / 10.0, |w| w.1);
            let dec = decay_envelope_check(&res.profile, res.tail.amplitude, r_fit, prm, 0.05)?;
            let pass = weak.passed && dec.passed();
            ok &= pass;
            rows.push(json!({"triple": t, "weak_lq0": weak, "decay": dec, "passed": pass}));
        }
        Ok((ok, json!(rows)))
    })
}

/// Seeded samples of the elementary `J_p` inequalities.
pub fn inequality_criterion(cfg: &SuiteConfig) -> Criterion {
    timed(9, "J_p inequality suite", 30, || {
        let mut rows = Vec::new();
        let mut ok = true;
        for p in INEQUALITY_EXPONENTS {
            let reps = inequality_suite(p, cfg.samples, cfg.seed)?;
            ok &= reps.iter().all(|r| r.passed);
            rows.push(json!({"p": p, "checks": reps}));
        }
        Ok((ok, json!({"samples_per_inequality": cfg.samples, "seed": cfg.seed, "results": rows})))
    })
}

/// Weighted identity, radial decay bound on pure powers and the inversion
/// identity of `Φ`.
pub fn lorentz_criterion(cfg: &SuiteConfig) -> Criterion {
    timed(10, "Lorentz machinery", 60, || {
        let grid = make_log_grid(1e-4, 1e4, 801)?;
        let prm3 = validate_params(3, 0.5, 2.0)?;
        let bubble = RadialProfile::from_fn(grid.clone(), TailPolicy::Power { exponent: 2.0 }, |r| 1.0 / (1.0 + r * r))?;
        let mut identity = Vec::new();
        for (theta, q) in [(1.0, 2.0), (2.0, 3.0), (3.0, 3.0), (1.8, 6.0)] {
            identity.push(json!({"profile": "bubble", "theta": theta, "q": q,
                "residual": weighted_identity_check(&bubble, theta, q, &prm3)?}));
        }
        for t in ROOT_TRIPLES {
            let prm = triple(t)?;
            let g = RadialProfile::from_fn(grid.clone(), TailPolicy::Power { exponent: prm.beta_star }, |r| {
                prm.gamma_truncated(r)
            })?;
            let q = 2.0 * prm.dim() / prm.beta_star;
            for theta in [1.0, 2.5] {
                identity.push(json!({"profile": "truncated_gamma", "triple": t, "theta": theta, "q": q,
                    "residual": weighted_identity_check(&g, theta, q, &prm)?}));
            }
        }
        let worst_identity = identity
            .iter()
            .map(|v| v["residual"].as_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);

        let radii = log_points(2e-4, 5e3, 41);
        let mut lemma = Vec::new();
        let mut worst_lemma = 0.0f64;
        for t in ROOT_TRIPLES {
            let prm = triple(t)?;
            for beta in [0.5 * prm.beta_star, prm.beta_star] {
                let u = RadialProfile::from_fn(grid.clone(), TailPolicy::Power { exponent: beta }, |r| r.powf(-beta))?;
                let q = prm.dim() / beta;
                let weak = lorentz_norm(&u, q, f64::INFINITY, &prm)?;
                let weak_dev = (weak / prm.omega_n.powf(1.0 / q) - 1.0).abs();
                let rep = radial_lemma_check(&u, q, f64::INFINITY, &prm, &radii, 1e-10)?;
                let dev = weak_dev.max(rep.slack.abs());
                worst_lemma = worst_lemma.max(if rep.passed { dev } else { f64::INFINITY });
                lemma.push(json!({"triple": t, "beta": beta, "weak_norm_deviation": weak_dev, "lemma": rep}));
            }
        }

        let mut worst_phi = 0.0f64;
        for n in 2..=5 {
            let prm = validate_params(n, 0.5, 2.0)?;
            for rho in [0.05, 0.3, 0.6, 0.9, 0.99] {
                worst_phi = worst_phi.max(homogeneity_defect(rho, &prm, &cfg.quad)?);
            }
        }
        let pass = worst_identity <= 1e-6 && worst_lemma <= 1e-10 && worst_phi <= 10.0 * cfg.quad.tol;
        Ok((
            pass,
            json!({
                "weighted_identity": {"max_residual": worst_identity, "cases": identity},
                "radial_lemma_pure_powers": {"max_deviation": worst_lemma, "cases": lemma},
                "phi_inversion": {"max_defect": worst_phi, "tolerance": 10.0 * cfg.quad.tol},
            }),
        ))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
}

/// Criteria 1–10 in order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut criteria = vec![
        root_criterion(cfg),
        sign_law_criterion(cfg),
        operator_oracle_criterion(cfg),
        truncated_power_criterion(cfg),
        capacity_criterion(cfg),
    ];
    let runs = MinimizerRuns::compute(cfg)?;
    criteria.push(minimizer_criterion(cfg, &runs));
    criteria.push(euler_lagrange_criterion(cfg, &runs));
    criteria.push(explicit_estimates_criterion(cfg, &runs));
    criteria.push(inequality_criterion(cfg));
    criteria.push(lorentz_criterion(cfg));
    Ok(SuiteReport {
        config: *cfg,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}
