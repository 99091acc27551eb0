//! The angular kernel `Φ(ρ)`: the interaction `|x - y|^{-(N+sp)}` averaged
//! over the sphere of `y` at fixed radii ratio `ρ = |y| / |x|`.
//!
//! In the polar angle `φ`,
//! `Φ(ρ) = |S^{N-2}| ∫_0^π sin^{N-2}φ (1 - 2ρ cos φ + ρ²)^{-(N+sp)/2} dφ`,
//! and `1 - 2ρ cos φ + ρ² = (1-ρ)² + 4ρ sin²(φ/2)`, which keeps the distance
//! to the singularity exact when `1 - ρ` is supplied directly.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::Parameters;
use crate::quadrature::{integrate_clustered, Endpoint, QuadratureSpec};

/// `Φ(ρ)` for `0 <= ρ < 1` given `gap = 1 - ρ` exactly.
pub(crate) fn phi_gap(rho: f64, gap: f64, prm: &Parameters, quad: &QuadratureSpec) -> f64 {
    if gap < SCALED_BELOW {
        return phi_scaled(rho, gap, prm, quad) * gap.powf(-1.0 - prm.sp);
    }
    let expo = -0.5 * prm.kernel_order();
    let k = prm.n as i32 - 2;
    if rho == 0.0 {
        return prm.sphere_nm1;
    }
    let g2 = gap * gap;
    let width = (gap / rho.sqrt()).min(1.0);
    let f = |phi: f64| {
        let h = (0.5 * phi).sin();
        phi.sin().powi(k) * (g2 + 4.0 * rho * h * h).powf(expo)
    };
    prm.sphere_nm2 * integrate_clustered(f, PI, 0.25 * width, Endpoint::Regular, quad)
}

const SCALED_BELOW: f64 = 1e-30;

/// `Φ(ρ) gap^{1+sp}`, bounded as `gap → 0`. For tiny gaps the integrand is
/// assembled in logarithms so that neither factor overflows.
pub(crate) fn phi_scaled(rho: f64, gap: f64, prm: &Parameters, quad: &QuadratureSpec) -> f64 {
    if gap >= SCALED_BELOW {
        return phi_gap(rho, gap, prm, quad) * gap.powf(1.0 + prm.sp);
    }
    let expo = -0.5 * prm.kernel_order();
    let nm2 = prm.dim() - 2.0;
    let lg = gap.ln();
    let c = 2.0 * rho.sqrt();
    let f = |phi: f64| {
        let lt = (c * (0.5 * phi).sin()).ln() - lg;
        let l1pt2 = if lt > 30.0 { 2.0 * lt } else { (2.0 * lt).exp().ln_1p() };
        (nm2 * phi.sin().ln() + (1.0 - prm.dim()) * lg + expo * l1pt2).exp()
    };
    let width = gap / rho.sqrt();
    prm.sphere_nm2 * integrate_clustered(f, PI, 0.25 * width, Endpoint::Regular, quad)
}

/// `Φ(ρ)` for `ρ >= 1` given `gap = ρ - 1`, through `Φ(ρ) = ρ^{-(N+sp)} Φ(1/ρ)`.
pub(crate) fn phi_gap_outer(rho: f64, gap: f64, prm: &Parameters, quad: &QuadratureSpec) -> f64 {
    let inv = 1.0 / rho;
    rho.powf(-prm.kernel_order()) * phi_gap(inv, gap * inv, prm, quad)
}

/// `Φ(1 - gap)` for `0 < gap <= 1`, without forming `1 - gap` first.
pub fn phi_from_gap(gap: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::Domain(format!("phi_from_gap needs 0 < gap <= 1, got {gap}")));
    }
    Ok(phi_gap(1.0 - gap, gap, prm, quad))
}

/// `Φ(1 - gap) gap^{1+sp}` for `0 < gap <= 1/2`; finite for gaps far below
/// the resolution of `ρ` itself.
pub fn phi_ratio_from_gap(gap: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    if !(gap > 0.0 && gap <= 0.5) {
        return Err(Error::Domain(format!("phi_ratio_from_gap needs 0 < gap <= 1/2, got {gap}")));
    }
    Ok(phi_scaled(1.0 - gap, gap, prm, quad))
}

/// Angular kernel on `[0, 1)`.
pub fn phi(rho: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("phi needs 0 <= rho < 1, got {rho}")));
    }
    Ok(phi_gap(rho, 1.0 - rho, prm, quad))
}

/// Angular kernel on `[0, 1) ∪ (1, ∞)`. Zero is accepted and delegated to
/// [`phi`].
pub fn phi_extended(rho: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    if !(rho >= 0.0) || rho == 1.0 || !rho.is_finite() {
        return Err(Error::Domain(format!("phi_extended needs rho >= 0, rho != 1, got {rho}")));
    }
    if rho < 1.0 {
        phi(rho, prm, quad)
    } else {
        Ok(phi_gap_outer(rho, rho - 1.0, prm, quad))
    }
}

/// `Φ(ρ)` for `ρ > 1` by the angular integral itself, without the
/// inversion identity used by [`phi_extended`].
pub fn phi_outer_direct(rho: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("phi_outer_direct needs rho > 1, got {rho}")));
    }
    Ok(phi_gap(rho, rho - 1.0, prm, quad))
}

/// `|Φ(1/ρ) / (ρ^{N+sp} Φ(ρ)) - 1|` for `ρ ∈ (0, 1)`, with `Φ(1/ρ)` from
/// [`phi_outer_direct`].
pub fn homogeneity_defect(rho: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    let outer = phi_outer_direct(1.0 / rho, prm, quad)?;
    let inner = phi(rho, prm, quad)?;
    Ok((outer / (rho.powf(prm.kernel_order()) * inner) - 1.0).abs())
}

/// `Φ(ρ) (1 - ρ)^{1+sp}` on `[0.5, 1)`.
pub fn phi_singularity_ratio(rho: f64, prm: &Parameters, quad: &QuadratureSpec) -> Result<f64> {
    if !(0.5..1.0).contains(&rho) {
        return Err(Error::Domain(format!("singularity ratio needs 0.5 <= rho < 1, got {rho}")));
    }
    let gap = 1.0 - rho;
    Ok(phi_gap(rho, gap, prm, quad) * gap.powf(1.0 + prm.sp))
}
