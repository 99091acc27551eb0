//! Pointwise values of `(-Δ_p)^s` on radial functions.
//!
//! Three routes: the closed form for pure powers, the bounded integral for
//! the truncated fundamental solution, and a folded principal-value
//! quadrature for smooth profiles,
//!
//! `(-Δ_p)^s u(r) = 2 r^{-sp} ∫_0^1 [J_p(u(r) - u(rρ)) ρ^{N-1}
//!                  + J_p(u(r) - u(r/ρ)) ρ^{sp-1}] Φ(ρ) dρ`,
//!
//! where the second term is the exterior shell `|y| > r` mapped onto `ρ < 1`
//! through `Φ(1/ρ) = ρ^{N+sp} Φ(ρ)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::phi_gap;
use crate::measure::j_p;
use crate::params::Parameters;
use crate::power::c_beta;
use crate::profile::{Radial, RadialProfile};
use crate::quadrature::{integrate_clustered, power_floor, Endpoint, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorPath {
    AnalyticPower,
    TruncatedPower,
    PvQuadrature,
}

impl OperatorPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorPath::AnalyticPower => "analytic-power",
            OperatorPath::TruncatedPower => "truncated-power",
            OperatorPath::PvQuadrature => "pv-quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorResult {
    pub radius: f64,
    pub value: f64,
    pub path: OperatorPath,
    pub est_error: f64,
}

/// `(-Δ_p)^s |x|^{-β}` at radius `r`: `C(β) r^{-β(p-1)-sp}`.
pub fn apply_to_power(beta: f64, r: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<OperatorResult> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    let c = c_beta(beta, prm, quad)?;
    let value = c * r.powf(-beta * (prm.p - 1.0) - prm.sp);
    Ok(OperatorResult {
        radius: r,
        value,
        path: OperatorPath::AnalyticPower,
        est_error: value.abs() * quad.tol,
    })
}

/// `(-Δ_p)^s Γ̃` at `r > 1`, where `Γ̃ = min{1, |x|^{-β*}}`. Outside the unit
/// ball `Γ̃` agrees with the fundamental solution, so only the difference
/// on `B_1` contributes:
/// `2 r^{-sp} ∫_0^{1/r} [J_p(Γ(rρ) - Γ(r)) - J_p(1 - Γ(r))] ρ^{N-1} Φ(ρ) dρ`.
pub fn apply_to_truncated_gamma(r: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<OperatorResult> {
    if !(r > 1.0 + 1e-6) || !r.is_finite() {
        return Err(Error::Domain(format!("truncated fundamental solution needs r > 1, got {r}")));
    }
    let (n, sp, p, bs) = (prm.dim(), prm.sp, prm.p, prm.beta_star);
    let g_r = prm.gamma(r);
    let flat = j_p(1.0 - g_r, p);
    let top = 1.0 / r;

    // Γ(rρ) - Γ(r) = (rρ)^{-β*} (1 - ρ^{β*}), so the first term times ρ^{N-1}
    // is r^{-(N-sp)} ρ^{sp-1} (1 - ρ^{β*})^{p-1}.
    let f = |rho: f64| {
        let lead = r.powf(sp - n) * rho.powf(sp - 1.0) * (-(bs * rho.ln()).exp_m1()).powf(p - 1.0);
        (lead - flat * rho.powf(n - 1.0)) * phi_gap(rho, 1.0 - rho, prm, quad)
    };
    let half = 0.5 * top;
    let inner = integrate_clustered(f, half, power_floor(sp - 1.0, quad.tol, half), Endpoint::Power(sp - 1.0), quad);

    // upper half clustered at ρ = 1/r, where Φ peaks when r is close to 1
    let gap = (r - 1.0) / r;
    let g = |e: f64| {
        let rho = top - e;
        let lead = r.powf(sp - n) * rho.powf(sp - 1.0) * (-(bs * rho.ln()).exp_m1()).powf(p - 1.0);
        (lead - flat * rho.powf(n - 1.0)) * phi_gap(rho, gap + e, prm, quad)
    };
    let outer = integrate_clustered(g, half, 0.25 * gap, Endpoint::Regular, quad);

    let value = 2.0 * r.powf(-sp) * (inner + outer);
    Ok(OperatorResult {
        radius: r,
        value,
        path: OperatorPath::TruncatedPower,
        est_error: value.abs() * quad.tol,
    })
}

/// Excluded band half-width for the principal value.
fn band_width(prm: &Parameters, quad: &QuadratureSpec) -> f64 {
    quad.tol.powf(1.0 / (prm.p - prm.sp + 1.0)).clamp(1e-6, 1e-2)
}

/// Folded principal-value quadrature for any radial function.
///
/// The band `1 - η < ρ < 1` is excluded and the result is extrapolated from
/// `η` and `η/2` assuming the omitted piece scales like `η^{p-sp}`.
pub fn apply_radial_pv_fn<R: Radial + ?Sized>(
    u: &R,
    r: f64,
    prm: &Parameters,
    quad: &QuadratureSpec,
) -> Result<OperatorResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    let (n, sp, p) = (prm.dim(), prm.sp, prm.p);
    let ur = u.eval(r);
    if !ur.is_finite() {
        return Err(Error::Profile(format!("profile not finite at r = {r}")));
    }
    let integrand = |rho: f64, gap: f64| {
        let a = j_p(ur - u.eval(r * rho), p) * rho.powf(n - 1.0);
        let b = j_p(ur - u.eval(r / rho), p) * rho.powf(sp - 1.0);
        (a + b) * phi_gap(rho, gap, prm, quad)
    };

    let left = integrate_clustered(
        |rho| integrand(rho, 1.0 - rho),
        0.5,
        power_floor(sp - 1.0, quad.tol, 0.5),
        Endpoint::Regular,
        quad,
    );
    let right = |eta: f64| {
        integrate_clustered(
            |e| {
                let d = eta + e;
                integrand(1.0 - d, d)
            },
            0.5 - eta,
            0.25 * eta,
            Endpoint::Regular,
            quad,
        )
    };
    let eta = band_width(prm, quad);
    let coarse = left + right(eta);
    let fine = left + right(0.5 * eta);
    let gain = 2f64.powf(p - sp) - 1.0;
    let correction = (fine - coarse) / gain;
    let scale = 2.0 * r.powf(-sp);
    let value = scale * (fine + correction);
    if !value.is_finite() {
        return Err(Error::Profile(format!("non-finite operator value at r = {r}")));
    }
    Ok(OperatorResult {
        radius: r,
        value,
        path: OperatorPath::PvQuadrature,
        est_error: scale * correction.abs() + value.abs() * quad.tol,
    })
}

/// Roughness bound on the spline variable for pointwise evaluation.
const MAX_ROUGHNESS: f64 = 0.25;

/// Principal-value quadrature on a sampled profile. `r` must lie at least two
/// cells inside the grid and the profile must look smooth around it.
pub fn apply_radial_pv(
    profile: &RadialProfile,
    r: f64,
    prm: &Parameters,
    quad: &QuadratureSpec,
) -> Result<OperatorResult> {
    let grid = profile.grid();
    let q = grid.ratio();
    if !(r >= grid.r_min() * q * q && r <= grid.r_max() / (q * q)) {
        return Err(Error::Domain(format!(
            "r = {r} too close to the grid edge [{}, {}]",
            grid.r_min(),
            grid.r_max()
        )));
    }
    let rough = profile.roughness_near(r, 3);
    if rough > MAX_ROUGHNESS {
        return Err(Error::Profile(format!(
            "profile too rough near r = {r} (second difference {rough:.3})"
        )));
    }
    apply_radial_pv_fn(profile, r, prm, quad)
}

/// Operator values at many radii, in parallel and in input order.
pub fn apply_radial_pv_many<R: Radial + ?Sized>(
    u: &R,
    radii: &[f64],
    prm: &Parameters,
    quad: &QuadratureSpec,
) -> Result<Vec<OperatorResult>> {
    radii.par_iter().map(|&r| apply_radial_pv_fn(u, r, prm, quad)).collect()
}

/// Relative Euler–Lagrange residual
/// `((-Δ_p)^s U - S U^{p*-1}) / (S U^{p*-1})` at each radius. A vanishing
/// numerator over a vanishing denominator counts as zero.
pub fn el_residual(
    profile: &RadialProfile,
    s_value: f64,
    prm: &Parameters,
    quad: &QuadratureSpec,
    radii: &[f64],
) -> Result<Vec<f64>> {
    radii
        .par_iter()
        .map(|&r| {
            let lhs = apply_radial_pv(profile, r, prm, quad)?.value;
            let u = profile.eval_smooth(r);
            if !(u >= 0.0) {
                return Err(Error::Profile(format!("negative profile value at r = {r}")));
            }
            let rhs = s_value * u.powf(prm.pstar - 1.0);
            let num = lhs - rhs;
            Ok(if rhs == 0.0 {
                if num.abs() <= 1e-12 {
                    0.0
                } else {
                    num.signum() * f64::INFINITY
                }
            } else {
                num / rhs
            })
        })
        .collect()
}
