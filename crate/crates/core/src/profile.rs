//! Sampled radial functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_log_grid, RadialGrid};

/// How a profile continues beyond `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailPolicy {
    /// Zero beyond `r_max`. Point evaluation jumps to zero; the energy
    /// discretization ramps linearly to zero over one grid cell.
    Zero,
    /// `u(r) = u(r_max) (r / r_max)^{-exponent}`.
    Power { exponent: f64 },
}

/// Anything that can be evaluated as a function of the radius.
pub trait Radial: Sync {
    fn eval(&self, r: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> Radial for F {
    fn eval(&self, r: f64) -> f64 {
        self(r)
    }
}

/// A radial function sampled on a log-uniform grid.
///
/// Between nodes two interpolants are available: piecewise linear in
/// `(log r, u)`, which is what the energy discretization assumes, and a
/// natural cubic spline (in `(log r, log u)` when every sample is positive)
/// used wherever second differences matter.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    tail: TailPolicy,
    value_at_zero: Option<f64>,
    nonincreasing: bool,
    nonnegative: bool,
    spline_log: bool,
    spline_y: Vec<f64>,
    spline_m: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>, tail: TailPolicy) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Profile(format!(
                "{} values for {} radii",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Profile(format!("non-finite value at node {i}")));
        }
        if let TailPolicy::Power { exponent } = tail {
            if !(exponent.is_finite() && exponent >= 0.0) {
                return Err(Error::Profile(format!("tail exponent {exponent} must be >= 0")));
            }
        }
        let nonincreasing = values.windows(2).all(|w| w[0] >= w[1]);
        let nonnegative = values.iter().all(|&v| v >= 0.0);
        let spline_log = values.iter().all(|&v| v > 0.0);
        let spline_y: Vec<f64> = if spline_log {
            values.iter().map(|v| v.ln()).collect()
        } else {
            values.clone()
        };
        let spline_m = natural_spline(&spline_y, grid.log_step());
        Ok(RadialProfile {
            grid,
            values,
            tail,
            value_at_zero: None,
            nonincreasing,
            nonnegative,
            spline_log,
            spline_y,
            spline_m,
        })
    }

    /// Sample `f` on `grid`.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: RadialGrid, tail: TailPolicy, f: F) -> Result<Self> {
        let values = grid.radii().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, tail)
    }

    pub fn with_value_at_zero(mut self, v0: f64) -> Self {
        self.value_at_zero = Some(v0);
        self
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> TailPolicy {
        self.tail
    }

    pub fn value_at_zero(&self) -> Option<f64> {
        self.value_at_zero
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.nonincreasing
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// Same grid and tail, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(self.grid.clone(), values, self.tail)?;
        out.value_at_zero = self.value_at_zero;
        Ok(out)
    }

    /// Multiply every sample by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self
            .with_values(self.values.iter().map(|v| c * v).collect())
            .expect("scaling keeps samples finite");
        out.value_at_zero = self.value_at_zero.map(|v| c * v);
        out
    }

    fn head(&self, r: f64) -> f64 {
        let u0 = self.values[0];
        match self.value_at_zero {
            Some(v0) => v0 + (u0 - v0) * r / self.grid.r_min(),
            None => u0,
        }
    }

    fn beyond(&self, r: f64) -> f64 {
        match self.tail {
            TailPolicy::Zero => 0.0,
            TailPolicy::Power { exponent } => {
                self.values[self.values.len() - 1] * (r / self.grid.r_max()).powf(-exponent)
            }
        }
    }

    fn locate(&self, r: f64) -> (usize, f64) {
        let x = self.grid.position(r);
        let k = (x.floor().max(0.0) as usize).min(self.values.len() - 2);
        (k, x - k as f64)
    }

    /// Piecewise linear in `log r`.
    pub fn eval_linear(&self, r: f64) -> f64 {
        if r < self.grid.r_min() {
            return self.head(r);
        }
        if r > self.grid.r_max() {
            return self.beyond(r);
        }
        let (k, t) = self.locate(r);
        (1.0 - t) * self.values[k] + t * self.values[k + 1]
    }

    /// Natural cubic spline in `log r` (and `log u` for positive profiles).
    pub fn eval_smooth(&self, r: f64) -> f64 {
        if r < self.grid.r_min() {
            return self.head(r);
        }
        if r > self.grid.r_max() {
            return self.beyond(r);
        }
        let (k, t) = self.locate(r);
        let h = self.grid.log_step();
        let s = 1.0 - t;
        let y = s * self.spline_y[k]
            + t * self.spline_y[k + 1]
            + h * h / 6.0 * ((s * s * s - s) * self.spline_m[k] + (t * t * t - t) * self.spline_m[k + 1]);
        if self.spline_log {
            y.exp()
        } else {
            y
        }
    }

    /// Largest relative second difference over the nodes within `span` of `r`,
    /// measured on the spline variable.
    pub fn roughness_near(&self, r: f64, span: usize) -> f64 {
        let n = self.values.len();
        let c = self.grid.position(r).round().clamp(1.0, (n - 2) as f64) as usize;
        let lo = c.saturating_sub(span).max(1);
        let hi = (c + span).min(n - 2);
        let y = &self.spline_y;
        let scale = if self.spline_log {
            1.0
        } else {
            y[lo - 1..=hi + 1].iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE)
        };
        (lo..=hi)
            .map(|i| (y[i + 1] - 2.0 * y[i] + y[i - 1]).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// `r,value` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.radii().iter().zip(&self.values) {
            out.push_str(&format!("{r:.16e},{v:.16e}\n"));
        }
        out
    }

    /// Parse `r,value` CSV. The radii must be log-uniform.
    pub fn from_csv(text: &str, tail: TailPolicy) -> Result<Self> {
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('r')) {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|x| x.trim().parse().ok())
                    .ok_or_else(|| Error::Profile(format!("line {}: expected `r,value`", lineno + 1)))
            };
            radii.push(parse(it.next())?);
            values.push(parse(it.next())?);
        }
        if radii.len() < 2 {
            return Err(Error::Profile("need at least two rows".into()));
        }
        let grid = make_log_grid(radii[0], radii[radii.len() - 1], radii.len())?;
        for (i, (a, b)) in grid.radii().iter().zip(&radii).enumerate() {
            if ((a - b) / a).abs() > 1e-9 {
                return Err(Error::Profile(format!("radius at row {i} is not log-uniform")));
            }
        }
        Self::new(grid, values, tail)
    }
}

impl Radial for RadialProfile {
    fn eval(&self, r: f64) -> f64 {
        self.eval_smooth(r)
    }
}

/// Second derivatives of the natural cubic spline through `y` on a uniform
/// grid of spacing `h`.
fn natural_spline(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm for M_{i-1} + 4 M_i + M_{i+1} = 6 Δ²y_i / h².
    let k = n - 2;
    let mut c = vec![0.0; k];
    let mut d = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        let rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
        let denom = 4.0 - if j > 0 { c[j - 1] } else { 0.0 };
        c[j] = 1.0 / denom;
        d[j] = (rhs - if j > 0 { d[j - 1] } else { 0.0 }) / denom;
    }
    m[k] = d[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = d[j] - c[j] * m[j + 2];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> RadialGrid {
        make_log_grid(1e-2, 1e2, 161).unwrap()
    }

    #[test]
    fn spline_reproduces_powers_in_log_log() {
        let p = RadialProfile::from_fn(grid(), TailPolicy::Zero, |r| r.powf(-1.3)).unwrap();
        for r in [0.0137, 0.5, 3.3, 77.0] {
            assert_relative_eq!(p.eval_smooth(r), r.powf(-1.3), max_relative = 1e-12);
        }
    }

    #[test]
    fn spline_accuracy_on_smooth_profile() {
        let f = |r: f64| 1.0 / (1.0 + r * r);
        let p = RadialProfile::from_fn(grid(), TailPolicy::Power { exponent: 2.0 }, f).unwrap();
        for r in [0.05, 0.71, 1.9, 12.0] {
            assert_relative_eq!(p.eval_smooth(r), f(r), max_relative = 1e-5);
            assert_relative_eq!(p.eval_linear(r), f(r), max_relative = 1e-2);
        }
    }

    #[test]
    fn tails_and_head() {
        let g = grid();
        let p = RadialProfile::from_fn(g.clone(), TailPolicy::Power { exponent: 2.0 }, |r| r.powi(-2)).unwrap();
        assert_relative_eq!(p.eval_linear(400.0), 400f64.powi(-2), max_relative = 1e-12);
        let z = RadialProfile::from_fn(g, TailPolicy::Zero, |r| 1.0 / (1.0 + r)).unwrap();
        assert_eq!(z.eval_linear(200.0), 0.0);
        assert_eq!(z.eval_linear(1e-5), z.values()[0]);
        let z = z.with_value_at_zero(1.0);
        assert_relative_eq!(z.eval_linear(0.5e-2), 0.5 * (1.0 + 1.0 / 1.01), max_relative = 1e-12);
    }

    #[test]
    fn flags() {
        let p = RadialProfile::from_fn(grid(), TailPolicy::Zero, |r| (1.0 - r).max(0.0)).unwrap();
        assert!(p.is_nonincreasing());
        assert!(p.is_nonnegative());
        let q = RadialProfile::from_fn(grid(), TailPolicy::Zero, |r| r.sin()).unwrap();
        assert!(!q.is_nonincreasing());
        assert!(RadialProfile::new(grid(), vec![f64::NAN; 161], TailPolicy::Zero).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let p = RadialProfile::from_fn(make_log_grid(0.1, 10.0, 9).unwrap(), TailPolicy::Zero, |r| {
            (-r).exp()
        })
        .unwrap();
        let text = p.to_csv();
        assert!(text.starts_with("r,value\n"));
        let q = RadialProfile::from_csv(&text, TailPolicy::Zero).unwrap();
        assert_eq!(p.values(), q.values());
    }
}
