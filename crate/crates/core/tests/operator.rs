use std::f64::consts::PI;

use approx::assert_relative_eq;
use fplab_core::operator::{
    apply_radial_pv, apply_radial_pv_fn, apply_to_power, apply_to_truncated_gamma, el_residual, OperatorPath,
};
use fplab_core::power::c_beta;
use fplab_core::{make_log_grid, validate_params, QuadratureSpec, RadialProfile, TailPolicy};

/// In three dimensions with `s = 1/2`, `p = 2`, the bubble `(1+r²)^{-1}`
/// satisfies `(-Δ)^{1/2} U = 2 U²` for the normalised half-Laplacian, whose
/// normalising constant is `1/π²`; the unnormalised operator carries a factor
/// `2π²`.
const BUBBLE_CONSTANT: f64 = 4.0 * PI * PI;

fn bubble(r: f64) -> f64 {
    1.0 / (1.0 + r * r)
}

#[test]
fn pv_matches_power_law() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    for beta in [1.2, 1.6, 2.4] {
        let u = move |r: f64| r.powf(-beta);
        for r in [0.5, 2.0, 8.0] {
            let pv = apply_radial_pv_fn(&u, r, &prm, &q).unwrap();
            let exact = apply_to_power(beta, r, &prm, &q).unwrap();
            assert_eq!(pv.path, OperatorPath::PvQuadrature);
            assert_relative_eq!(pv.value, exact.value, max_relative = 1e-5);
        }
    }
}

#[test]
fn pv_matches_power_law_nonquadratic() {
    let q = QuadratureSpec::default();
    for (n, s, p) in [(3, 0.5, 2.5), (3, 0.5, 1.5), (4, 0.3, 3.0), (2, 0.75, 1.5)] {
        let prm = validate_params(n, s, p).unwrap();
        let (lo, hi) = fplab_core::power::beta_window(&prm);
        for t in [0.25, 0.7] {
            let beta = lo + t * (hi - lo);
            let u = move |r: f64| r.powf(-beta);
            let pv = apply_radial_pv_fn(&u, 1.7, &prm, &q).unwrap();
            let exact = c_beta(beta, &prm, &q).unwrap() * 1.7f64.powf(-beta * (p - 1.0) - prm.sp);
            assert_relative_eq!(pv.value, exact, max_relative = 1e-4, epsilon = 1e-6);
        }
    }
}

#[test]
fn pv_power_homogeneity() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.5).unwrap();
    let beta = 1.2;
    let u = move |r: f64| r.powf(-beta);
    let k = beta * (prm.p - 1.0) + prm.sp;
    let base = apply_radial_pv_fn(&u, 1.0, &prm, &q).unwrap().value;
    for r in [0.03, 0.4, 5.0, 90.0] {
        let v = apply_radial_pv_fn(&u, r, &prm, &q).unwrap().value * r.powf(k);
        assert_relative_eq!(v, base, max_relative = 1e-6);
    }
}

#[test]
fn sampled_power_profile() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let grid = make_log_grid(1e-6, 1e6, 961).unwrap();
    for beta in [1.2, 1.6, 2.4] {
        let prof = RadialProfile::from_fn(grid.clone(), TailPolicy::Power { exponent: beta }, |r| r.powf(-beta)).unwrap();
        for r in [0.5, 2.0, 8.0] {
            let pv = apply_radial_pv(&prof, r, &prm, &q).unwrap();
            let exact = apply_to_power(beta, r, &prm, &q).unwrap();
            assert_relative_eq!(pv.value, exact.value, max_relative = 1e-3);
        }
    }
}

#[test]
fn bubble_solves_critical_equation() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    for r in [0.5, 1.0, 2.0, 5.0] {
        let v = apply_radial_pv_fn(&bubble, r, &prm, &q).unwrap();
        assert_relative_eq!(v.value / bubble(r).powi(2), BUBBLE_CONSTANT, max_relative = 1e-6);
        assert!(v.est_error < 1e-4 * v.value.abs(), "{v:?}");
    }
    let grid = make_log_grid(1e-4, 1e4, 801).unwrap();
    let prof = RadialProfile::from_fn(grid, TailPolicy::Power { exponent: 2.0 }, bubble).unwrap();
    let res = el_residual(&prof, BUBBLE_CONSTANT, &prm, &q, &[0.5, 1.0, 2.0, 5.0]).unwrap();
    assert!(res.iter().all(|r| r.abs() < 1e-3), "{res:?}");
}

#[test]
fn residual_conventions() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let grid = make_log_grid(1e-3, 1e3, 301).unwrap();
    let flat = RadialProfile::from_fn(grid.clone(), TailPolicy::Power { exponent: 0.0 }, |_| 1.0).unwrap();
    assert_eq!(el_residual(&flat, 0.0, &prm, &q, &[1.0]).unwrap(), vec![0.0]);

    // c U with S fixed: numerator = c^{p-1} L - S c^{p*-1} U^{p*-1}
    let prof = RadialProfile::from_fn(grid, TailPolicy::Power { exponent: 2.0 }, bubble).unwrap();
    let c = 1.7;
    let r = 1.3;
    let base = apply_radial_pv(&prof, r, &prm, &q).unwrap().value;
    let rhs = BUBBLE_CONSTANT * prof.eval_smooth(r).powf(prm.pstar - 1.0);
    let scaled = el_residual(&prof.scaled(c), BUBBLE_CONSTANT, &prm, &q, &[r]).unwrap()[0];
    let expect = (c.powf(prm.p - 1.0) * base - c.powf(prm.pstar - 1.0) * rhs) / (c.powf(prm.pstar - 1.0) * rhs);
    assert_relative_eq!(scaled, expect, max_relative = 1e-6, epsilon = 1e-9);
}

#[test]
fn sampled_profile_preconditions() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let grid = make_log_grid(1e-2, 1e2, 201).unwrap();
    let prof = RadialProfile::from_fn(grid.clone(), TailPolicy::Zero, bubble).unwrap();
    assert!(apply_radial_pv(&prof, 1e-2, &prm, &q).is_err());
    assert!(apply_radial_pv(&prof, 99.0, &prm, &q).is_err());
    let jagged = RadialProfile::from_fn(grid, TailPolicy::Zero, |r| if (r.ln() * 50.0).sin() > 0.0 { 1.0 } else { 0.1 }).unwrap();
    assert!(apply_radial_pv(&jagged, 1.0, &prm, &q).is_err());
}

#[test]
fn truncated_gamma_limit() {
    // r^{N+sp} value → 2 |S^{N-1}| ∫_0^1 (t^{-(N-sp)} - 1) t^{N-1} dt, evaluated
    // here by midpoint sums on t = e^{-x} as an independent check of the
    // closed form 2 ω_N (N - sp) / sp.
    let q = QuadratureSpec::default();
    for (n, s, p) in [(3, 0.5, 2.0), (4, 0.3, 3.0), (2, 0.75, 1.5)] {
        let prm = validate_params(n, s, p).unwrap();
        let nf = n as f64;
        let m = 200_000;
        let dx = 60.0 / m as f64;
        let limit_sum: f64 = (0..m)
            .map(|k| {
                let x = (k as f64 + 0.5) * dx;
                ((prm.sp * -x).exp() - (-nf * x).exp()) * dx
            })
            .sum::<f64>()
            * 2.0
            * prm.sphere_nm1;
        let closed = 2.0 * prm.omega_n * (nf - prm.sp) / prm.sp;
        assert_relative_eq!(limit_sum, closed, max_relative = 1e-6);
        let r = 1e4;
        let v = apply_to_truncated_gamma(r, &prm, &q).unwrap().value * r.powf(nf + prm.sp);
        assert_relative_eq!(v, closed, max_relative = 2e-3);
    }
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let v100 = apply_to_truncated_gamma(100.0, &prm, &q).unwrap().value * 100f64.powf(4.0);
    assert_relative_eq!(v100, 16.0 * PI / 3.0, max_relative = 0.02);
}

#[test]
fn truncated_gamma_positive_band() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let mut lo = f64::MAX;
    let mut hi = 0.0f64;
    for k in 0..=40 {
        let r = 2.0 * 50f64.powf(k as f64 / 40.0);
        let v = apply_to_truncated_gamma(r, &prm, &q).unwrap().value;
        assert!(v > 0.0);
        let w = v * r.powf(4.0);
        lo = lo.min(w);
        hi = hi.max(w);
    }
    assert!(lo > 0.0 && hi / lo < 10.0);
}

#[test]
fn truncated_gamma_against_pv_on_rounded_corner() {
    // soft minimum of 1 and r^{-β*}, rounded on a shell of relative width ~1/(kβ*)
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let k = 24.0;
    let bs = prm.beta_star;
    let soft = move |r: f64| (1.0 + r.powf(k * bs)).powf(-1.0 / k);
    for r in [3.0, 10.0, 30.0] {
        let exact = apply_to_truncated_gamma(r, &prm, &q).unwrap().value;
        let pv = apply_radial_pv_fn(&soft, r, &prm, &q).unwrap().value;
        assert_relative_eq!(pv, exact, max_relative = 0.02);
    }
}
