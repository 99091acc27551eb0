//! Power-law tail fitting in log-log variables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    /// Decay exponent `e` in `u(r) ≈ A r^{-e}`.
    pub exponent: f64,
    pub amplitude: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    /// Largest relative deviation from the fitted power inside the window.
    pub residual: f64,
}

/// Ordinary least squares of `log u` against `log r` over the grid nodes
/// inside `[lo, hi]`.
pub fn fit_tail_exponent(profile: &RadialProfile, window: (f64, f64)) -> Result<TailFit> {
    let (lo, hi) = window;
    let grid = profile.grid();
    if !(lo < hi) || lo < grid.r_min() * (1.0 - 1e-12) || hi > grid.r_max() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "window [{lo}, {hi}] not inside grid [{}, {}]",
            grid.r_min(),
            grid.r_max()
        )));
    }
    let idx = grid.window_indices(lo, hi);
    if idx.len() < 8 {
        return Err(Error::Domain(format!("window holds {} nodes, need 8", idx.len())));
    }
    let mut xs = Vec::with_capacity(idx.len());
    let mut ys = Vec::with_capacity(idx.len());
    for i in idx {
        let v = profile.values()[i];
        if !(v > 0.0) {
            return Err(Error::Profile(format!(
                "non-positive value {v} at r = {}",
                grid.radii()[i]
            )));
        }
        xs.push(grid.radii()[i].ln());
        ys.push(v.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).exp_m1().abs())
        .fold(0.0, f64::max);
    Ok(TailFit {
        exponent: -slope,
        amplitude: intercept.exp(),
        window_lo: lo,
        window_hi: hi,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_log_grid;
    use crate::profile::TailPolicy;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power() {
        let g = make_log_grid(1e-2, 1e3, 200).unwrap();
        let p = RadialProfile::from_fn(g, TailPolicy::Zero, |r| 3.0 * r.powi(-2)).unwrap();
        let fit = fit_tail_exponent(&p, (1.0, 100.0)).unwrap();
        assert_relative_eq!(fit.exponent, 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.amplitude, 3.0, max_relative = 1e-11);
        assert!(fit.residual < 1e-11);
    }

    #[test]
    fn bubble_shape() {
        let g = make_log_grid(1e-2, 1e3, 300).unwrap();
        let p = RadialProfile::from_fn(g, TailPolicy::Zero, |r| 1.0 / (1.0 + r * r)).unwrap();
        let fit = fit_tail_exponent(&p, (10.0, 100.0)).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.05);
    }

    #[test]
    fn oscillating_perturbation() {
        let g = make_log_grid(1e-2, 1e3, 300).unwrap();
        let p = RadialProfile::from_fn(g, TailPolicy::Zero, |r| r.powi(-2) * (1.0 + 0.01 * r.ln().sin()))
            .unwrap();
        let fit = fit_tail_exponent(&p, (10.0, 100.0)).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.02);
    }

    #[test]
    fn bad_windows() {
        let g = make_log_grid(1.0, 10.0, 50).unwrap();
        let p = RadialProfile::from_fn(g, TailPolicy::Zero, |r| 1.0 / r).unwrap();
        assert!(fit_tail_exponent(&p, (0.5, 5.0)).is_err());
        assert!(fit_tail_exponent(&p, (2.0, 2.1)).is_err());
        let z = p.with_values(vec![0.0; 50]).unwrap();
        assert!(fit_tail_exponent(&z, (2.0, 8.0)).is_err());
    }
}
