use std::f64::consts::PI;

use approx::assert_relative_eq;
use fplab_core::kernel::homogeneity_defect;
use fplab_core::{phi, phi_extended, phi_singularity_ratio, validate_params, QuadratureSpec};
use proptest::prelude::*;

/// Elementary antiderivative in three dimensions: with `w = 1 - 2ρ cos φ + ρ²`,
/// `sin φ dφ = dw / (2ρ)`.
fn phi3(rho: f64, sp: f64) -> f64 {
    PI / rho * 2.0 / (1.0 + sp) * ((1.0 - rho).powf(-1.0 - sp) - (1.0 + rho).powf(-1.0 - sp))
}

#[test]
fn three_dimensional_closed_form() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    assert_relative_eq!(phi(0.5, &prm, &q).unwrap(), 64.0 * PI / 9.0, max_relative = 1e-12);
    assert_relative_eq!(phi_extended(2.0, &prm, &q).unwrap(), 4.0 * PI / 9.0, max_relative = 1e-12);
    for (s, p) in [(0.5, 2.0), (0.3, 3.0), (0.75, 1.5), (0.9, 1.2)] {
        let prm = validate_params(3, s, p).unwrap();
        for rho in [0.01, 0.3, 0.9, 0.999, 1.0 - 1e-6] {
            let v = phi(rho, &prm, &q).unwrap();
            assert_relative_eq!(v, phi3(rho, prm.sp), max_relative = 1e-9);
        }
    }
}

#[test]
fn singular_prefactor_stays_bounded() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let ratios: Vec<f64> = [0.5, 0.9, 0.99, 0.999]
        .iter()
        .map(|&r| phi_singularity_ratio(r, &prm, &q).unwrap())
        .collect();
    assert!(ratios.iter().all(|&r| r > 0.0 && r.is_finite()));
    let band = &ratios[1..];
    let (lo, hi) = band.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 2.0);
    // limit π for N = 3, sp = 1
    let near = phi_singularity_ratio(1.0 - 1e-7, &prm, &q).unwrap();
    assert_relative_eq!(near, PI, max_relative = 1e-6);
}

#[test]
fn two_dimensional_kernel_against_series() {
    // N = 2: Φ(ρ) = 2 ∫_0^π (1 - 2ρ cos φ + ρ²)^{-a} dφ, and
    // (1 - 2ρ cos φ + ρ²)^{-a} = Σ_k C_k^{(a)}(cos φ) ρ^k (Gegenbauer), whose
    // φ-average is Σ_j [(a)_j / j!]² ρ^{2j}.
    let q = QuadratureSpec::default();
    let prm = validate_params(2, 0.75, 1.5).unwrap();
    let a = 0.5 * prm.kernel_order();
    let rho: f64 = 0.3;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..200 {
        let jf = j as f64;
        term *= ((a + jf) / (jf + 1.0)).powi(2) * rho * rho;
        sum += term;
    }
    assert_relative_eq!(phi(rho, &prm, &q).unwrap(), 2.0 * PI * sum, max_relative = 1e-12);
}

#[test]
fn refinement_convergence() {
    let q = QuadratureSpec::default();
    for n in 2..=5 {
        let prm = validate_params(n, 0.35, 2.2).unwrap();
        for rho in [0.1, 0.7, 0.99, 1.0 - 1e-4, 1.0 - 1e-6] {
            let a = phi(rho, &prm, &q).unwrap();
            let b = phi(rho, &prm, &q.refined()).unwrap();
            assert!(((a - b) / b).abs() <= q.tol, "N={n} rho={rho}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneity_in_three_dimensions(rho in 0.01f64..0.99, s in 0.05f64..0.95, p in 1.1f64..4.0) {
        prop_assume!(s * p < 3.0);
        let q = QuadratureSpec::default();
        let prm = validate_params(3, s, p).unwrap();
        let outer = phi_extended(1.0 / rho, &prm, &q).unwrap();
        let inner = phi3(rho, prm.sp);
        let rel = (outer * rho.powf(-prm.kernel_order()) / inner - 1.0).abs();
        prop_assert!(rel <= 10.0 * q.tol, "rel = {}", rel);
    }

    #[test]
    fn homogeneity_by_direct_quadrature(n in 2i64..6, rho in 0.01f64..0.99, s in 0.05f64..0.95, p in 1.1f64..4.0) {
        prop_assume!(s * p < n as f64);
        let q = QuadratureSpec::default();
        let prm = validate_params(n, s, p).unwrap();
        let d = homogeneity_defect(rho, &prm, &q).unwrap();
        prop_assert!(d <= 10.0 * q.tol, "defect = {}", d);
    }

    #[test]
    fn positive_and_increasing(n in 2i64..6, s in 0.05f64..0.95, p in 1.1f64..4.0, a in 0.0f64..0.98, b in 0.0f64..0.98) {
        prop_assume!(s * p < n as f64 && (a - b).abs() > 1e-6);
        let q = QuadratureSpec::default();
        let prm = validate_params(n, s, p).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let fl = phi(lo, &prm, &q).unwrap();
        let fh = phi(hi, &prm, &q).unwrap();
        prop_assert!(fl > 0.0);
        prop_assert!(fh > fl);
    }
}

#[test]
fn scaled_kernel_near_contact() {
    // Φ(1 - g) g^{1+sp} → 2π/(1+sp) in three dimensions, uniformly down to tiny gaps
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.7, 1.3).unwrap();
    for g in [1e-20, 1e-31, 1e-80, 1e-200] {
        let v = fplab_core::kernel::phi_ratio_from_gap(g, &prm, &q).unwrap();
        assert_relative_eq!(v, 2.0 * PI / (1.0 + prm.sp), max_relative = 1e-10);
    }
}
