//! Composite Gauss–Legendre quadrature on meshes graded toward an endpoint.
//!
//! Every singular or sharply peaked 1-D integral in the crate is reduced to
//! the form `∫_0^L f(d) dd` where all the difficulty sits at `d = 0`. The
//! mesh is algebraically graded toward `d = 0` (`d_j = L (j/P)^g`) and the
//! innermost panel is further split geometrically, by a factor of four per
//! level, until it is narrower than a caller-supplied floor.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Panel counts, grading and tolerance for the singular 1-D integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Panels per smooth piece before geometric refinement.
    pub panels: usize,
    /// Algebraic grading exponent toward the singular endpoint.
    pub grading: f64,
    /// Gauss–Legendre order on each panel.
    pub points_per_panel: usize,
    /// Target relative accuracy.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panels: 16,
            grading: 3.0,
            points_per_panel: 16,
            tol: 1e-9,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.panels < 4 {
            return Err(Error::Quadrature(format!("panels = {} < 4", self.panels)));
        }
        if self.points_per_panel < 4 || self.points_per_panel > MAX_ORDER {
            return Err(Error::Quadrature(format!(
                "points_per_panel = {} outside [4, {MAX_ORDER}]",
                self.points_per_panel
            )));
        }
        if !(self.grading >= 1.0 && self.grading.is_finite()) {
            return Err(Error::Quadrature(format!("grading = {} < 1", self.grading)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Quadrature(format!("tol = {} outside (0, 1)", self.tol)));
        }
        Ok(())
    }

    /// Same spec with the panel count doubled, for refinement studies.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            panels: self.panels * 2,
            ..*self
        }
    }

    pub fn rule(&self) -> &'static GaussLegendre {
        GaussLegendre::cached(self.points_per_panel)
    }
}

const MAX_ORDER: usize = 64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the three-term Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn cached(n: usize) -> &'static GaussLegendre {
        static RULES: [OnceLock<GaussLegendre>; MAX_ORDER + 1] =
            [const { OnceLock::new() }; MAX_ORDER + 1];
        assert!(n <= MAX_ORDER, "Gauss-Legendre order {n} above {MAX_ORDER}");
        RULES[n].get_or_init(|| GaussLegendre::new(n))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Behaviour of an integrand at the clustered endpoint `d = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    /// Smooth or merely peaked: the innermost panel is integrated by
    /// Gauss–Legendre like every other panel.
    Regular,
    /// Integrable power law `f(d) ~ c d^alpha` with `alpha > -1`; the
    /// innermost panel `[0, d0]` is replaced by `f(d0) d0 / (alpha + 1)`.
    Power(f64),
}

/// Breakpoints `0 = d_0 < ... < d_m = length`, graded toward zero.
pub fn clustered_breakpoints(length: f64, floor: f64, spec: &QuadratureSpec) -> Vec<f64> {
    let p = spec.panels;
    let mut pts: Vec<f64> = (0..=p)
        .map(|j| length * (j as f64 / p as f64).powf(spec.grading))
        .collect();
    let first = pts[1];
    let mut inner = Vec::new();
    let mut w = first;
    while w > floor && w > f64::MIN_POSITIVE * 1e10 {
        w *= 0.25;
        inner.push(w);
    }
    inner.reverse();
    let mut out = Vec::with_capacity(pts.len() + inner.len());
    out.push(0.0);
    out.extend(inner);
    out.extend(pts.drain(1..));
    out
}

/// `∫_0^length f(d) dd` on a mesh clustered at `d = 0`.
pub fn integrate_clustered<F: FnMut(f64) -> f64>(
    mut f: F,
    length: f64,
    floor: f64,
    endpoint: Endpoint,
    spec: &QuadratureSpec,
) -> f64 {
    if length <= 0.0 {
        return 0.0;
    }
    let rule = spec.rule();
    let pts = clustered_breakpoints(length, floor.min(length), spec);
    let mut total = 0.0;
    for (k, win) in pts.windows(2).enumerate() {
        let (a, b) = (win[0], win[1]);
        if k == 0 {
            if let Endpoint::Power(alpha) = endpoint {
                total += f(b) * b / (alpha + 1.0);
                continue;
            }
        }
        total += rule.integrate(a, b, &mut f);
    }
    total
}

/// Floor for an endpoint power law `d^alpha`: the omitted or approximated
/// innermost piece is then below `tol` relative to an O(1) integral.
pub fn power_floor(alpha: f64, tol: f64, length: f64) -> f64 {
    let e = (alpha + 1.0).max(1e-3);
    (length * (tol * 1e-2).powf(1.0 / e)).max(1e-280)
}
