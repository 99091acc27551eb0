//! Sobolev quotient, capacity problem, step barriers and comparison checks.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{lq_power_sum, EnergyModel};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::isotonic::project_nonincreasing;
use crate::kernel::phi_gap;
use crate::measure::j_p;
use crate::operator::{apply_radial_pv_fn, apply_to_truncated_gamma};
use crate::params::Parameters;
use crate::profile::{RadialProfile, TailPolicy};
use crate::quadrature::{integrate_clustered, Endpoint, QuadratureSpec};
use crate::report::CheckReport;
use crate::tail::{fit_tail_exponent, TailFit};

/// `[u]^p` of a sampled profile, piecewise linear in `log r` between nodes.
pub fn gagliardo_energy(profile: &RadialProfile, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    let g = profile.grid();
    let model = EnergyModel::new(prm, g.r_min(), g.log_step(), g.len(), profile.tail(), quad)?;
    Ok(model.value(profile.values()))
}

/// `‖u‖_q` including head and tail contributions.
pub fn lq_norm(profile: &RadialProfile, q: f64, prm: &Parameters) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("exponent q = {q} must be positive")));
    }
    let g = profile.grid();
    let (s, _) = lq_power_sum(profile.values(), g.r_min(), g.log_step(), q, profile.tail(), prm)?;
    Ok(s.powf(1.0 / q))
}

pub fn lpstar_norm(profile: &RadialProfile, prm: &Parameters) -> Result<f64> {
    lq_norm(profile, prm.pstar, prm)
}

/// Energy over `‖u‖_{p*}^p` for a sampled profile.
pub fn sobolev_quotient(profile: &RadialProfile, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    let e = gagliardo_energy(profile, prm, quad)?;
    let d = lpstar_norm(profile, prm)?.powf(prm.p);
    if d == 0.0 {
        return Err(Error::Domain("quotient undefined for the zero profile".into()));
    }
    Ok(e / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Stop once an accepted step changes every nodal value by less than
    /// `tol` relative to itself (for the quotient, after discounting a
    /// dilation of the iterate).
    pub tol: f64,
    /// Relative regularization of `|t|^{p-2}` in the preconditioner;
    /// `None` picks `1e-12` for `p < 2` and `1e-6` otherwise.
    pub hessian_eps: Option<f64>,
    /// Window for the tail fit; defaults to `[r_max/100, r_max/10]`.
    pub fit_window: Option<(f64, f64)>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iters: 200,
            tol: 1e-5,
            hessian_eps: None,
            fit_window: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizerResult {
    pub profile: RadialProfile,
    pub s_estimate: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub tail: TailFit,
    /// Accepted objective values, one per iteration.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerSummary {
    pub s_estimate: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub tail_exponent: f64,
    pub tail_amplitude: f64,
    pub fit_window: (f64, f64),
    pub beta_star: f64,
}

impl MinimizerResult {
    pub fn summary(&self, prm: &Parameters) -> MinimizerSummary {
        MinimizerSummary {
            s_estimate: self.s_estimate,
            iterations: self.iterations,
            grad_norm: self.grad_norm,
            converged: self.converged,
            tail_exponent: self.tail.exponent,
            tail_amplitude: self.tail.amplitude,
            fit_window: (self.tail.window_lo, self.tail.window_hi),
            beta_star: prm.beta_star,
        }
    }
}

impl MinimizeOptions {
    fn eps_for(&self, p: f64) -> f64 {
        self.hessian_eps.unwrap_or(if p < 2.0 { 1e-12 } else { 1e-6 })
    }
}

fn default_window(grid: &RadialGrid) -> (f64, f64) {
    (grid.r_max() / 100.0, grid.r_max() / 10.0)
}

/// Solve `H d = -g`, falling back to steepest descent when `H` is not
/// positive definite or the result is not a descent direction.
fn newton_direction(h: DMatrix<f64>, g: &[f64]) -> Vec<f64> {
    let rhs = DVector::from_iterator(g.len(), g.iter().map(|x| -x));
    let d = h.cholesky().map(|c| c.solve(&rhs));
    match d {
        Some(d) if d.iter().all(|x| x.is_finite()) && d.dot(&rhs) > 0.0 => d.iter().copied().collect(),
        _ => rhs.iter().copied().collect(),
    }
}

fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(a, b)| {
            let d = (a - b).abs();
            if d == 0.0 {
                0.0
            } else {
                d / a.abs().max(b.abs())
            }
        })
        .fold(0.0, f64::max)
}

struct QuotientState {
    q: f64,
    grad: Vec<f64>,
}

/// Minimize `[u]^p / ‖u‖_{p*}^p` over nonnegative non-increasing radial
/// profiles on `grid`, with zero tail beyond `r_max`.
///
/// Each iteration steps along `-H^{-1} ∇Q`, with `H` the regularized Hessian
/// of the discrete energy, halving the step until the quotient does not
/// increase; the candidate is clipped to `u ≥ 0`, projected onto
/// non-increasing sequences and rescaled to `‖u‖_{p*} = 1`.
pub fn minimize_quotient(
    prm: &Parameters,
    grid: &RadialGrid,
    quad: &QuadratureSpec,
    opts: &MinimizeOptions,
) -> Result<MinimizerResult> {
    let decades = (grid.r_max() / grid.r_min()).log10();
    if decades < 5.0 - 1e-9 {
        return Err(Error::Grid(format!("minimization grid spans {decades:.2} decades, need at least 5")));
    }
    let (r_min, h, n) = (grid.r_min(), grid.log_step(), grid.len());
    let tail = TailPolicy::Zero;
    let model = EnergyModel::new(prm, r_min, h, n, tail, quad)?;
    let (p, ps) = (prm.p, prm.pstar);

    let normalize = |v: &mut Vec<f64>| -> Result<()> {
        let (s, _) = lq_power_sum(v, r_min, h, ps, tail, prm)?;
        if !(s > 0.0) {
            return Err(Error::Domain("iterate collapsed to zero".into()));
        }
        let c = s.powf(-1.0 / ps);
        v.iter_mut().for_each(|x| *x *= c);
        Ok(())
    };
    let project = |v: &[f64]| -> Result<Vec<f64>> {
        let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
        let mut out = project_nonincreasing(&clipped);
        normalize(&mut out)?;
        Ok(out)
    };
    let quotient = |v: &[f64]| -> Result<f64> {
        let e = model.value(v);
        let (s, _) = lq_power_sum(v, r_min, h, ps, tail, prm)?;
        Ok(e / s.powf(p / ps))
    };
    let state = |v: &[f64]| -> Result<QuotientState> {
        let (e, ge) = model.value_and_gradient(v);
        let (s, gs) = lq_power_sum(v, r_min, h, ps, tail, prm)?;
        let d = s.powf(p / ps);
        let dd = (p / ps) * s.powf(p / ps - 1.0);
        let q = e / d;
        let grad = ge.iter().zip(&gs).map(|(a, b)| (a - q * dd * b) / d).collect();
        Ok(QuotientState { q, grad })
    };

    let mut u: Vec<f64> = grid
        .radii()
        .iter()
        .map(|&r| (1.0 + r * r).powf(-0.5 * prm.beta_star))
        .collect();
    normalize(&mut u)?;
    let mut st = state(&u)?;
    let mut history = vec![st.q];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let hess = model.hessian(&u, opts.eps_for(prm.p));
        let d = newton_direction(hess, &st.grad);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-10 {
            let trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let cand = project(&trial)?;
            let qc = quotient(&cand)?;
            if qc <= st.q {
                accepted = Some((cand, qc));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, _)) = accepted else {
            converged = true;
            break;
        };
        let change = relative_change(&u, &cand);
        u = cand;
        st = state(&u)?;
        history.push(st.q);
        if change <= opts.tol {
            converged = true;
            break;
        }
    }

    let grad_norm = st.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let profile = RadialProfile::new(grid.clone(), u, tail)?;
    let window = opts.fit_window.unwrap_or_else(|| default_window(grid));
    let tail_fit = fit_tail_exponent(&profile, window)?;
    Ok(MinimizerResult {
        profile,
        s_estimate: st.q,
        iterations,
        grad_norm,
        converged,
        tail: tail_fit,
        history,
    })
}

#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub profile: RadialProfile,
    pub i_value: f64,
    pub r: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacitySummary {
    pub radius: f64,
    pub i_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl CapacityResult {
    pub fn summary(&self) -> CapacitySummary {
        CapacitySummary {
            radius: self.r,
            i_value: self.i_value,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

/// `I(R) = inf { [u]^p : u ≥ 1 on B_R }` by projected Newton descent.
///
/// Nodes with `r ≤ R` are fixed at 1 (and the next node too when `R` is not a
/// node, so the interpolant dominates the obstacle); the rest are kept in
/// `[0, 1]` and non-increasing. The profile continues past `r_max` as
/// `r^{-β*}`.
pub fn solve_capacity(
    prm: &Parameters,
    grid: &RadialGrid,
    radius: f64,
    quad: &QuadratureSpec,
    opts: &MinimizeOptions,
) -> Result<CapacityResult> {
    let n = grid.len();
    let q = grid.ratio();
    if !(radius >= grid.r_min() * q && radius <= grid.r_max() / q.powi(4)) {
        return Err(Error::Domain(format!(
            "capacity radius {radius} must lie inside the grid [{}, {}]",
            grid.r_min(),
            grid.r_max()
        )));
    }
    let tail = TailPolicy::Power { exponent: prm.beta_star };
    let model = EnergyModel::new(prm, grid.r_min(), grid.log_step(), n, tail, quad)?;
    let pos = grid.position(radius);
    let near = pos.round();
    let last_fixed = if (pos - near).abs() < 1e-9 { near as usize } else { pos.ceil() as usize };
    let free0 = last_fixed + 1;
    let nf = n - free0;

    let project = |v: &[f64]| -> Vec<f64> {
        let clipped: Vec<f64> = v
            .iter()
            .enumerate()
            .map(|(i, x)| if i < free0 { 1.0 } else { x.clamp(0.0, 1.0) })
            .collect();
        let mut out = project_nonincreasing(&clipped);
        out[..free0].iter_mut().for_each(|x| *x = 1.0);
        out
    };

    let mut u: Vec<f64> = grid
        .radii()
        .iter()
        .map(|&r| (r / radius).powf(-prm.beta_star).min(1.0))
        .collect();
    u = project(&u);
    let (mut e, mut g) = model.value_and_gradient(&u);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let hess = model.hessian(&u, opts.eps_for(prm.p));
        let hff = hess.view((free0, free0), (nf, nf)).into_owned();
        let d = newton_direction(hff, &g[free0..]);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-10 {
            let mut trial = u.clone();
            for (k, dk) in d.iter().enumerate() {
                trial[free0 + k] += t * dk;
            }
            let cand = project(&trial);
            let ec = model.value(&cand);
            if ec <= e {
                accepted = Some((cand, ec));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, _)) = accepted else {
            converged = true;
            break;
        };
        let change = relative_change(&u, &cand);
        u = cand;
        (e, g) = model.value_and_gradient(&u);
        if change <= opts.tol {
            converged = true;
            break;
        }
    }
    let profile = RadialProfile::new(grid.clone(), u, tail)?.with_value_at_zero(1.0);
    Ok(CapacityResult {
        profile,
        i_value: e,
        r: radius,
        iterations,
        converged,
    })
}

/// `u_1(R)^p R^{N-sp} ≤ 1 - (1 - u_1(R))^p` at each `R`, with `allowed`
/// relative slack.
pub fn decu1_check(cap: &CapacityResult, radii: &[f64], prm: &Parameters, allowed: f64) -> Result<CheckReport> {
    if (cap.r - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("decay check needs the R = 1 potential, got R = {}", cap.r)));
    }
    let exp = prm.dim() - prm.sp;
    let samples: Vec<(f64, f64, f64)> = radii
        .iter()
        .map(|&r| {
            let t = cap.profile.eval_linear(r).clamp(0.0, 1.0);
            (r, t.powf(prm.p) * r.powf(exp), -(prm.p * (-t).ln_1p()).exp_m1())
        })
        .collect();
    Ok(CheckReport::from_samples("capacity-level-inequality", samples, allowed))
}

/// `u_1(R) R^{β*} ≤ p^{1/(p-1)}` at each `R`.
pub fn capacity_decay_check(cap: &CapacityResult, radii: &[f64], prm: &Parameters, allowed: f64) -> Result<CheckReport> {
    if (cap.r - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("decay check needs the R = 1 potential, got R = {}", cap.r)));
    }
    let bound = prm.p.powf(1.0 / (prm.p - 1.0));
    let samples = radii
        .iter()
        .map(|&r| (r, cap.profile.eval_linear(r) * r.powf(prm.beta_star), bound));
    Ok(CheckReport::from_samples("capacity-decay-upper", samples, allowed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierSense {
    Lower,
    Upper,
}

/// `g(r) = levels[k]` where `k` counts the breakpoints `≤ r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepBarrierSpec {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
    pub sense: BarrierSense,
}

impl StepBarrierSpec {
    pub fn level_at(&self, r: f64) -> f64 {
        let k = self.breakpoints.iter().take_while(|&&b| b <= r).count();
        self.levels[k]
    }

    fn validate(&self, grid: &RadialGrid) -> Result<()> {
        if self.levels.len() != self.breakpoints.len() + 1 {
            return Err(Error::Barrier(format!(
                "{} levels for {} breakpoints (need one more level)",
                self.levels.len(),
                self.breakpoints.len()
            )));
        }
        if let Some(l) = self.levels.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::Barrier(format!("level {l} must be finite and nonnegative")));
        }
        if self.breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Barrier("breakpoints must be strictly increasing".into()));
        }
        if let Some(b) = self
            .breakpoints
            .iter()
            .find(|&&b| !(b >= grid.r_min() && b <= grid.r_max()))
        {
            return Err(Error::Barrier(format!(
                "breakpoint {b} outside the grid [{}, {}]",
                grid.r_min(),
                grid.r_max()
            )));
        }
        Ok(())
    }
}

/// Samples `g(r) Γ̃(r)` on `grid`.
pub fn build_step_barrier(spec: &StepBarrierSpec, prm: &Parameters, grid: &RadialGrid) -> Result<RadialProfile> {
    spec.validate(grid)?;
    let profile = RadialProfile::from_fn(grid.clone(), TailPolicy::Power { exponent: prm.beta_star }, |r| {
        spec.level_at(r) * prm.gamma_truncated(r)
    })?;
    Ok(profile.with_value_at_zero(spec.levels[0]))
}

/// One side of a comparison, with its own route to operator values.
#[derive(Debug, Clone, Copy)]
pub enum ComparisonSide<'a> {
    /// A smooth sampled profile; principal-value quadrature.
    Profile(&'a RadialProfile),
    /// `ε Γ̃`; the bounded integral for the truncated fundamental solution.
    ScaledTruncatedGamma(f64),
    /// `min{u_1, u_1(c)}` for the capacitary potential `u_1`. Outside `B_c`
    /// only the cut-off part contributes, since `u_1` is annihilated there.
    CappedPotential { potential: &'a CapacityResult, cap: f64 },
}

impl ComparisonSide<'_> {
    pub fn value(&self, r: f64, prm: &Parameters) -> f64 {
        match *self {
            ComparisonSide::Profile(u) => u.eval_smooth(r),
            ComparisonSide::ScaledTruncatedGamma(eps) => eps * prm.gamma_truncated(r),
            ComparisonSide::CappedPotential { potential, cap } => {
                let u = &potential.profile;
                u.eval_linear(r).min(u.eval_linear(cap))
            }
        }
    }

    pub fn operator(&self, r: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
        match *self {
            ComparisonSide::Profile(u) => Ok(apply_radial_pv_fn(u, r, prm, quad)?.value),
            ComparisonSide::ScaledTruncatedGamma(eps) => {
                Ok(eps.abs().powf(prm.p - 1.0).copysign(eps) * apply_to_truncated_gamma(r, prm, quad)?.value)
            }
            ComparisonSide::CappedPotential { potential, cap } => capped_potential_operator(potential, cap, r, prm, quad),
        }
    }
}

/// `2 ∫_{B_c} [J_p(u_1(r) - u_1(c)) - J_p(u_1(r) - u_1(y))] |x - y|^{-N-sp} dy`
/// for `|x| = r > c`, the operator of `min{u_1, u_1(c)}` outside `B_c`.
pub fn capped_potential_operator(
    potential: &CapacityResult,
    cap: f64,
    r: f64,
    prm: &Parameters,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let big = potential.r;
    if !(cap > big && r > cap) {
        return Err(Error::Domain(format!(
            "capped potential needs R = {big} < c = {cap} < r = {r}"
        )));
    }
    let u = &potential.profile;
    let (n, sp, p) = (prm.dim(), prm.sp, prm.p);
    let ur = u.eval_linear(r);
    let head = j_p(ur - u.eval_linear(cap), p);
    let f = |rho: f64| {
        let y = r * rho;
        let uy = if y <= big { 1.0 } else { u.eval_linear(y) };
        (head - j_p(ur - uy, p)) * rho.powf(n - 1.0) * phi_gap(rho, 1.0 - rho, prm, quad)
    };
    // flat part of u_1 on B_R, then the boundary layer clustered at ρ = R/r
    let a = big / r;
    let inner = integrate_clustered(|e| f(a - e), a, a * 1e-3, Endpoint::Regular, quad);
    let b = cap / r - a;
    let outer = integrate_clustered(|e| f(a + e), b, b * 1e-9, Endpoint::Regular, quad);
    Ok(2.0 * r.powf(-sp) * (inner + outer))
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    /// `u ≤ v` for `r ≤ inner_radius`.
    pub inside: CheckReport,
    /// Operator of `u` below that of `v` at the sample radii.
    pub operator: CheckReport,
    /// `u ≤ v` everywhere.
    pub conclusion: CheckReport,
    pub premises_hold: bool,
    pub conclusion_holds: bool,
}

fn log_points(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// Numerical comparison of two radial functions: premises `u ≤ v` inside
/// `B_{inner}` and `(-Δ_p)^s u ≤ (-Δ_p)^s v` at `sample_radii`, conclusion
/// `u ≤ v` on a log grid of radii spanning six decades around `inner`.
/// `tol` is the relative slack allowed on each inequality.
pub fn comparison_check(
    u: ComparisonSide<'_>,
    v: ComparisonSide<'_>,
    inner_radius: f64,
    prm: &Parameters,
    quad: &QuadratureSpec,
    sample_radii: &[f64],
    tol: f64,
) -> Result<ComparisonReport> {
    if !(inner_radius > 0.0) {
        return Err(Error::Domain(format!("inner radius {inner_radius} must be positive")));
    }
    if let Some(r) = sample_radii.iter().find(|&&r| !(r > inner_radius)) {
        return Err(Error::Domain(format!("sample radius {r} must exceed the inner radius {inner_radius}")));
    }
    let inside_pts = log_points(inner_radius * 1e-3, inner_radius, 121);
    let inside = CheckReport::from_samples(
        "comparison-inside",
        inside_pts.iter().map(|&r| (r, u.value(r, prm), v.value(r, prm))),
        tol,
    );
    let ops: Vec<(f64, f64, f64)> = sample_radii
        .par_iter()
        .map(|&r| Ok((r, u.operator(r, prm, quad)?, v.operator(r, prm, quad)?)))
        .collect::<Result<_>>()?;
    let operator = CheckReport::from_samples("comparison-operator", ops, tol);
    let mut everywhere = log_points(inner_radius * 1e-3, inner_radius * 1e3, 361);
    everywhere.extend_from_slice(sample_radii);
    let conclusion = CheckReport::from_samples(
        "comparison-conclusion",
        everywhere.iter().map(|&r| (r, u.value(r, prm), v.value(r, prm))),
        tol,
    );
    Ok(ComparisonReport {
        premises_hold: inside.passed && operator.passed,
        conclusion_holds: conclusion.passed,
        inside,
        operator,
        conclusion,
    })
}

/// The lower-barrier scale `ε = 0.9 min{u_1(3) 3^{β*}, (c_1/c_2)^{1/(p-1)}}`,
/// with `c_1 = 2 c |B_1| / 2^{N+sp}`,
/// `c = inf_{a ∈ [0, u_1(3)]} (1 - a)^{p-1} - (u_1(2) - a)^{p-1}` and
/// `c_2 = sup_{r > 3} r^{N+sp} (-Δ_p)^s Γ̃(r)` sampled on `probe_radii`.
pub fn potential_barrier_scale(
    potential: &CapacityResult,
    prm: &Parameters,
    quad: &QuadratureSpec,
    probe_radii: &[f64],
) -> Result<f64> {
    if (potential.r - 1.0).abs() > 1e-12 {
        return Err(Error::Domain("barrier scale needs the R = 1 potential".into()));
    }
    let (p, k) = (prm.p, prm.kernel_order());
    let u = &potential.profile;
    let u2 = u.eval_linear(2.0);
    let u3 = u.eval_linear(3.0);
    let c = (0..=1000)
        .map(|i| {
            let a = u3 * i as f64 / 1000.0;
            (1.0 - a).powf(p - 1.0) - (u2 - a).powf(p - 1.0)
        })
        .fold(f64::INFINITY, f64::min);
    if !(c > 0.0) {
        return Err(Error::Domain(format!("non-positive gap constant c = {c}")));
    }
    let c1 = 2.0 * c * prm.omega_n / 2f64.powf(k);
    let c2 = probe_radii
        .par_iter()
        .map(|&r| Ok(apply_to_truncated_gamma(r, prm, quad)?.value * r.powf(k)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    let by_level = u3 * 3f64.powf(prm.beta_star);
    let by_operator = (c1 / c2).powf(1.0 / (p - 1.0));
    Ok(0.9 * by_level.min(by_operator))
}
