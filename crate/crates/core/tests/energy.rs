use std::f64::consts::PI;

use approx::assert_relative_eq;
use fplab_core::energy::{lq_power_sum, EnergyModel};
use fplab_core::{make_log_grid, validate_params, QuadratureSpec, TailPolicy};

fn bubble(r: f64) -> f64 {
    1.0 / (1.0 + r * r)
}

#[test]
fn bubble_energy_in_three_dimensions() {
    // [U]^2 = 4π² ∫ U³ = 4π² · 4π · π/16 = π⁴
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let grid = make_log_grid(1e-4, 1e4, 641).unwrap();
    let model = EnergyModel::new(&prm, 1e-4, grid.log_step(), grid.len(), TailPolicy::Power { exponent: 2.0 }, &q).unwrap();
    let v: Vec<f64> = grid.radii().iter().map(|&r| bubble(r)).collect();
    let e = model.value(&v);
    assert_relative_eq!(e, PI.powi(4), max_relative = 2e-3);

    let (l3, _) = lq_power_sum(&v, 1e-4, grid.log_step(), 3.0, TailPolicy::Power { exponent: 2.0 }, &prm).unwrap();
    assert_relative_eq!(l3, PI * PI / 4.0, max_relative = 1e-3);
}

#[test]
fn energy_converges_under_refinement() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let err = |n: usize| {
        let grid = make_log_grid(1e-4, 1e4, n).unwrap();
        let model = EnergyModel::new(&prm, 1e-4, grid.log_step(), n, TailPolicy::Power { exponent: 2.0 }, &q).unwrap();
        let v: Vec<f64> = grid.radii().iter().map(|&r| bubble(r)).collect();
        (model.value(&v) - PI.powi(4)).abs()
    };
    let coarse = err(161);
    let fine = err(321);
    assert!(fine < 0.4 * coarse, "{coarse} -> {fine}");
}

#[test]
fn gradient_matches_finite_differences() {
    let q = QuadratureSpec::default();
    for (p, tail) in [(2.0, TailPolicy::Zero), (2.5, TailPolicy::Power { exponent: 1.6 }), (1.5, TailPolicy::Zero)] {
        let prm = validate_params(3, 0.5, p).unwrap();
        let grid = make_log_grid(1e-2, 1e2, 41).unwrap();
        let model = EnergyModel::new(&prm, 1e-2, grid.log_step(), 41, tail, &q).unwrap();
        let v: Vec<f64> = grid.radii().iter().map(|&r| (1.0 + r * r).powf(-0.8) + 0.01 * (3.0 * r.ln()).sin()).collect();
        let (e, g) = model.value_and_gradient(&v);
        assert_relative_eq!(e, model.value(&v), max_relative = 1e-12);
        let gmax = g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for i in [0, 7, 20, 33, 40] {
            let step = 1e-6;
            let mut a = v.clone();
            let mut b = v.clone();
            a[i] += step;
            b[i] -= step;
            let fd = (model.value(&a) - model.value(&b)) / (2.0 * step);
            assert_relative_eq!(g[i], fd, max_relative = 1e-5, epsilon = 1e-7 * gmax);
        }
    }
}

#[test]
fn hessian_matches_gradient_differences() {
    let q = QuadratureSpec::default();
    for (p, tail) in [(2.0, TailPolicy::Power { exponent: 2.0 }), (2.5, TailPolicy::Zero)] {
        let prm = validate_params(3, 0.5, p).unwrap();
        let grid = make_log_grid(1e-2, 1e2, 31).unwrap();
        let model = EnergyModel::new(&prm, 1e-2, grid.log_step(), 31, tail, &q).unwrap();
        let v: Vec<f64> = grid.radii().iter().map(|&r| bubble(r)).collect();
        let h = model.hessian(&v, 0.0);
        for i in [0, 12, 30] {
            let step = 1e-6;
            let mut a = v.clone();
            let mut b = v.clone();
            a[i] += step;
            b[i] -= step;
            let ga = model.value_and_gradient(&a).1;
            let gb = model.value_and_gradient(&b).1;
            for j in 0..31 {
                let fd = (ga[j] - gb[j]) / (2.0 * step);
                assert_relative_eq!(h[(j, i)], fd, max_relative = 1e-4, epsilon = 1e-6 * h[(i, i)].abs());
            }
        }
    }
}

#[test]
fn energy_is_even_homogeneous_and_translation_invariant() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.4, 2.3).unwrap();
    let grid = make_log_grid(1e-2, 1e2, 81).unwrap();
    let model = EnergyModel::new(&prm, 1e-2, grid.log_step(), 81, TailPolicy::Zero, &q).unwrap();
    assert_eq!(model.value(&vec![0.0; 81]), 0.0);
    let v: Vec<f64> = grid.radii().iter().map(|&r| (-r).exp()).collect();
    let e = model.value(&v);
    let scaled: Vec<f64> = v.iter().map(|x| -2.0 * x).collect();
    assert_relative_eq!(model.value(&scaled), 2f64.powf(2.3) * e, max_relative = 1e-12);
}

#[test]
fn dilation_scaling() {
    // u(·/λ) has energy λ^{N-sp} [u]^p; a shift by k nodes is a dilation by e^{kh}.
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.5).unwrap();
    let grid = make_log_grid(1e-4, 1e4, 401).unwrap();
    let h = grid.log_step();
    let tail = TailPolicy::Power { exponent: 2.0 };
    let model = EnergyModel::new(&prm, 1e-4, h, 401, tail, &q).unwrap();
    let f = |r: f64| (1.0 + r * r).powf(-1.0);
    let k = 20;
    let lam = (k as f64 * h).exp();
    let v: Vec<f64> = grid.radii().iter().map(|&r| f(r)).collect();
    let w: Vec<f64> = grid.radii().iter().map(|&r| f(r / lam)).collect();
    let ratio = model.value(&w) / model.value(&v);
    assert_relative_eq!(ratio, lam.powf(3.0 - prm.sp), max_relative = 1e-2);
}

#[test]
fn divergent_tails_are_rejected() {
    let q = QuadratureSpec::default();
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    assert!(EnergyModel::new(&prm, 1e-2, 0.1, 10, TailPolicy::Power { exponent: 0.9 }, &q).is_err());
    assert!(lq_power_sum(&[1.0; 10], 1e-2, 0.1, 3.0, TailPolicy::Power { exponent: 1.0 }, &prm).is_err());
}

#[test]
fn lq_of_truncated_fundamental_solution() {
    // ∫ Γ̃³ = 4π (1/3 + ∫_1^∞ r^{-4} dr) = 8π/3 for N = 3, β* = 2
    let prm = validate_params(3, 0.5, 2.0).unwrap();
    let grid = make_log_grid(1e-3, 1e3, 1201).unwrap();
    let v: Vec<f64> = grid.radii().iter().map(|&r| prm.gamma_truncated(r)).collect();
    let (s, g) = lq_power_sum(&v, 1e-3, grid.log_step(), 3.0, TailPolicy::Power { exponent: 2.0 }, &prm).unwrap();
    assert_relative_eq!(s, 8.0 * PI / 3.0, max_relative = 1e-3);
    assert_eq!(g.len(), v.len());
}
