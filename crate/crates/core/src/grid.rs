//! Log-uniform radial grids.

use serde::Serialize;

use crate::error::{Error, Result};

/// Log-uniform radii `r_i = r_min e^{i h}` with trapezoid weights in `log r`.
///
/// The weights integrate `∫ f(r) d(log r)`; multiply by `r` (or a power of
/// it) for other measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    radii: Vec<f64>,
    weights: Vec<f64>,
    log_step: f64,
}

/// Build `n` log-uniform nodes on `[r_min, r_max]`.
pub fn make_log_grid(r_min: f64, r_max: f64, n: usize) -> Result<RadialGrid> {
    if !(r_min > 0.0 && r_min.is_finite()) {
        return Err(Error::Grid(format!("r_min = {r_min} must be positive")));
    }
    if !(r_max > r_min && r_max.is_finite()) {
        return Err(Error::Grid(format!("r_max = {r_max} must exceed r_min = {r_min}")));
    }
    if n < 2 {
        return Err(Error::Grid(format!("need at least 2 nodes, got {n}")));
    }
    let l0 = r_min.ln();
    let h = (r_max.ln() - l0) / (n - 1) as f64;
    let mut radii: Vec<f64> = (0..n).map(|i| (l0 + i as f64 * h).exp()).collect();
    radii[0] = r_min;
    radii[n - 1] = r_max;
    let mut weights = vec![h; n];
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
    Ok(RadialGrid {
        radii,
        weights,
        log_step: h,
    })
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_max(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// Spacing `h` in `log r`.
    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    /// Node ratio `e^h`.
    pub fn ratio(&self) -> f64 {
        self.log_step.exp()
    }

    /// Radius of (possibly out-of-range) node index `i`.
    pub fn radius_at(&self, i: isize) -> f64 {
        (self.r_min().ln() + i as f64 * self.log_step).exp()
    }

    /// Fractional node coordinate of `r`: `(log r - log r_min) / h`.
    pub fn position(&self, r: f64) -> f64 {
        (r.ln() - self.r_min().ln()) / self.log_step
    }

    /// Index of the node closest to `r` in log scale, if `r` is in range.
    pub fn nearest(&self, r: f64) -> Option<usize> {
        let x = self.position(r).round();
        if x < 0.0 || x > (self.len() - 1) as f64 {
            None
        } else {
            Some(x as usize)
        }
    }

    /// Whether `r` coincides with a node up to `1e-9` in log scale.
    pub fn is_node(&self, r: f64) -> bool {
        let x = self.position(r);
        (x - x.round()).abs() < 1e-9 && self.nearest(r).is_some()
    }

    /// Nodes with `lo <= r <= hi`, tolerant to roundoff at the ends.
    pub fn window_indices(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = (self.position(lo) - 1e-9).ceil().max(0.0) as usize;
        let b = ((self.position(hi) + 1e-9).floor() + 1.0).max(0.0) as usize;
        a.min(self.len())..b.min(self.len())
    }
}
