//! The power constant `C(β)` with `(-Δ_p)^s |x|^{-β} = C(β) |x|^{-β(p-1)-sp}`,
//!
//! `C(β) = 2 ∫_0^1 ρ^{sp-1} [1 - ρ^κ] |1 - ρ^β|^{p-1} Φ(ρ) dρ`,
//! `κ = N - sp - β(p-1)`,
//!
//! and the root `β* = (N - sp)/(p - 1)` where `κ = 0`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{phi_gap, phi_scaled};
use crate::params::Parameters;
use crate::quadrature::{integrate_clustered, power_floor, Endpoint, QuadratureSpec};

const EDGE_MARGIN: f64 = 1e-3;

/// Open interval of exponents for which `C(β)` is finite.
pub fn beta_window(prm: &Parameters) -> (f64, f64) {
    let n = prm.dim();
    ((n - prm.sp) / prm.p, n / (prm.p - 1.0))
}

fn check_window(beta: f64, prm: &Parameters) -> Result<()> {
    let (lo, hi) = beta_window(prm);
    if !(beta > lo && beta < hi) {
        return Err(Error::Domain(format!("beta = {beta} outside ({lo}, {hi})")));
    }
    Ok(())
}

pub fn c_beta(beta: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    check_window(beta, prm)?;
    let kappa = prm.dim() - prm.sp - beta * (prm.p - 1.0);
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let (sp, pm1) = (prm.sp, prm.p - 1.0);

    // ρ in (0, 1/2], clustered at the origin
    let a0 = sp - 1.0 + kappa.min(0.0);
    let near0 = |rho: f64| {
        let l = rho.ln();
        bracket(rho, l, sp, kappa) * (-(beta * l).exp_m1()).powf(pm1) * phi_gap(rho, 1.0 - rho, prm, quad)
    };
    let left = integrate_clustered(near0, 0.5, power_floor(a0, quad.tol, 0.5), Endpoint::Power(a0), quad);

    // d = 1 - ρ in (0, 1/2], clustered at d = 0
    let a1 = prm.p - 1.0 - sp;
    let near1 = |d: f64| {
        let rho = 1.0 - d;
        let l = (-d).ln_1p();
        let b = bracket(rho, l, sp, kappa) / d;
        let c = (-(beta * l).exp_m1() / d).powf(pm1);
        b * c * phi_scaled(rho, d, prm, quad) * d.powf(a1)
    };
    let right = integrate_clustered(near1, 0.5, power_floor(a1, quad.tol, 0.5), Endpoint::Power(a1), quad);

    Ok(2.0 * (left + right))
}

/// `ρ^{sp-1} (1 - ρ^κ)` without overflow for `κ < 0` near the origin.
fn bracket(rho: f64, l: f64, sp: f64, kappa: f64) -> f64 {
    if kappa >= 0.0 {
        rho.powf(sp - 1.0) * -(kappa * l).exp_m1()
    } else {
        rho.powf(sp - 1.0 + kappa) * (-kappa * l).exp_m1()
    }
}

/// `C(β)` over a sweep of exponents, evaluated in parallel, in input order.
pub fn c_beta_sweep(betas: &[f64], prm: &Parameters, quad: &QuadratureSpec) -> Result<Vec<f64>> {
    betas.par_iter().map(|&b| c_beta(b, prm, quad)).collect()
}

/// Bisection on the sign of `C` over the window shrunk by `1e-3` at both
/// ends, down to an interval of width `tol`.
pub fn find_root_beta(prm: &Parameters, quad: &QuadratureSpec, tol: f64) -> Result<f64> {
    let (lo, hi) = beta_window(prm);
    let mut a = lo + EDGE_MARGIN;
    let mut b = hi - EDGE_MARGIN;
    let fa = c_beta(a, prm, quad)?;
    let fb = c_beta(b, prm, quad)?;
    if !(fa > 0.0 && fb < 0.0) {
        return Err(Error::Bracket(format!(
            "C({a}) = {fa:e} and C({b}) = {fb:e} do not straddle zero"
        )));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = c_beta(m, prm, quad)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
