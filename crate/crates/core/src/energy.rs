//! Discrete Gagliardo energy on a log-uniform grid.
//!
//! With `x = log r` and `λ = -log ρ`,
//!
//! `[u]^p = 2 |S^{N-1}| ∫ r^{N-sp} ∫_0^∞ |U(x) - U(x-λ)|^p k(λ) dλ dx`,
//! `k(λ) = e^{-Nλ} Φ(e^{-λ})`.
//!
//! `U` is piecewise linear in `x` between nodes, flat below `r_min`, and
//! continued past `r_max` by ghost nodes (zero, or the power tail) over two
//! decades. The inner integral splits into grid cells `λ ∈ [mh, (m+1)h]`; on
//! each cell `U(x_i - λ)` is linear, so the weights depend only on `m` and
//! are tabulated once. The outer integral is the trapezoid rule in `x`; past
//! the last ghost the outer integrand decays like `r^{-δ}` and is summed
//! exactly.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{phi_gap, phi_scaled};
use crate::params::Parameters;
use crate::profile::TailPolicy;
use crate::quadrature::{integrate_clustered, power_floor, Endpoint, GaussLegendre, QuadratureSpec};

const CELL_POINTS: usize = 8;
const GHOST_DECADES: f64 = 2.0;
const CHUNK: usize = 32;

/// Tabulated discretization of the energy for one grid, parameter triple and
/// tail policy. The free unknowns are the `n` grid values.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    p: f64,
    n: usize,
    m: usize,
    ghost: Vec<f64>,
    outer: Vec<f64>,
    c0: f64,
    fq: [f64; CELL_POINTS],
    omega: Vec<[f64; CELL_POINTS]>,
    head: Vec<f64>,
}

#[inline]
fn pw(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t * t
    } else {
        t.abs().powf(p)
    }
}

/// `(|t|^p, p J_p(t))`.
#[inline]
fn pw_d(t: f64, p: f64) -> (f64, f64) {
    if p == 2.0 {
        (t * t, 2.0 * t)
    } else {
        let a = t.abs();
        if a == 0.0 {
            return (0.0, 0.0);
        }
        let q = a.powf(p - 1.0);
        (q * a, p * q.copysign(t))
    }
}

/// Regularized `p (p-1) |t|^{p-2}`.
#[inline]
fn pw_dd(t: f64, p: f64, eps2: f64) -> f64 {
    if p == 2.0 {
        2.0
    } else {
        p * (p - 1.0) * (t * t + eps2).powf(0.5 * (p - 2.0))
    }
}

impl EnergyModel {
    pub fn new(
        prm: &Parameters,
        r_min: f64,
        h: f64,
        n: usize,
        tail: TailPolicy,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        if n < 2 || !(h > 0.0) || !(r_min > 0.0) {
            return Err(Error::Grid("energy needs at least two nodes and positive spacing".into()));
        }
        let (nf, sp, p) = (prm.dim(), prm.sp, prm.p);
        let (delta, ghost_rate) = match tail {
            TailPolicy::Zero => (sp, None),
            TailPolicy::Power { exponent } => {
                let d = exponent * p - (nf - sp);
                if !(d > 0.0) {
                    return Err(Error::Divergent(format!(
                        "power tail r^-{exponent} has infinite energy (needs exponent > {})",
                        (nf - sp) / p
                    )));
                }
                (d, Some(exponent))
            }
        };
        let g = ((GHOST_DECADES * std::f64::consts::LN_10) / h).ceil() as usize;
        let m = n + g;
        let ghost: Vec<f64> = (1..=g)
            .map(|j| match ghost_rate {
                None => 0.0,
                Some(e) => (-(e * h * j as f64)).exp(),
            })
            .collect();

        let radius = |i: usize| (r_min.ln() + i as f64 * h).exp();
        let two_s = 2.0 * prm.sphere_nm1;
        let mut outer: Vec<f64> = (0..m).map(|i| two_s * h * radius(i).powf(nf - sp)).collect();
        outer[0] *= 0.5;
        outer[m - 1] *= 0.5 + 1.0 / (delta * h);

        let rule = GaussLegendre::cached(CELL_POINTS);
        let mut fq = [0.0; CELL_POINTS];
        let mut wq = [0.0; CELL_POINTS];
        for (k, (x, w)) in rule.mapped(0.0, 1.0).enumerate() {
            fq[k] = x;
            wq[k] = w;
        }
        let kernel = |lam: f64| {
            let gap = -(-lam).exp_m1();
            (-nf * lam).exp() * phi_gap(1.0 - gap, gap, prm, quad)
        };
        let omega: Vec<[f64; CELL_POINTS]> = (0..m)
            .into_par_iter()
            .map(|mm| {
                let mut row = [0.0; CELL_POINTS];
                if mm > 0 {
                    for q in 0..CELL_POINTS {
                        row[q] = h * wq[q] * kernel((mm as f64 + fq[q]) * h);
                    }
                }
                row
            })
            .collect();

        // ∫_0^1 f^p h k(fh) df with k(λ) ~ λ^{-1-sp}
        let a = p - 1.0 - sp;
        let c0 = integrate_clustered(
            |f: f64| {
                let lam = f * h;
                let gap = -(-lam).exp_m1();
                let ratio = (f / gap).powf(1.0 + sp);
                h * f.powf(a) * ratio * (-nf * lam).exp() * phi_scaled(1.0 - gap, gap, prm, quad)
            },
            1.0,
            power_floor(a, quad.tol, 1.0),
            Endpoint::Power(a),
            quad,
        );

        let mut head = vec![0.0; m];
        let mut acc = prm.sphere_nm1 * (-nf * m as f64 * h).exp() / nf;
        for i in (1..m).rev() {
            acc += omega[i].iter().sum::<f64>();
            head[i] = acc;
        }

        Ok(EnergyModel {
            p,
            n,
            m,
            ghost,
            outer,
            c0,
            fq,
            omega,
            head,
        })
    }

    /// Free unknowns.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn extend(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "energy expects one value per grid node");
        let last = v[self.n - 1];
        let mut u = Vec::with_capacity(self.m);
        u.extend_from_slice(v);
        u.extend(self.ghost.iter().map(|c| c * last));
        u
    }

    fn fold_gradient(&self, gu: &[f64]) -> Vec<f64> {
        let mut g = gu[..self.n].to_vec();
        let extra: f64 = self.ghost.iter().zip(&gu[self.n..]).map(|(c, x)| c * x).sum();
        g[self.n - 1] += extra;
        g
    }

    fn node_energy(&self, u: &[f64], i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let p = self.p;
        let ui = u[i];
        let mut e = self.c0 * pw(u[i - 1] - ui, p) + self.head[i] * pw(ui - u[0], p);
        for mm in 1..i {
            let a = ui - u[i - mm];
            let b = u[i - mm - 1] - u[i - mm];
            let w = &self.omega[mm];
            for q in 0..CELL_POINTS {
                e += w[q] * pw(a - self.fq[q] * b, p);
            }
        }
        e
    }

    pub fn value(&self, v: &[f64]) -> f64 {
        let u = self.extend(v);
        let parts: Vec<f64> = (0..self.m)
            .into_par_iter()
            .with_min_len(CHUNK)
            .map(|i| self.outer[i] * self.node_energy(&u, i))
            .collect();
        parts.iter().sum()
    }

    fn chunk_gradient(&self, u: &[f64], range: std::ops::Range<usize>) -> (f64, Vec<f64>) {
        let p = self.p;
        let mut g = vec![0.0; self.m];
        let mut total = 0.0;
        for i in range {
            if i == 0 {
                continue;
            }
            let wi = self.outer[i];
            let ui = u[i];
            let mut e = 0.0;
            let (v, d) = pw_d(u[i - 1] - ui, p);
            e += self.c0 * v;
            g[i - 1] += wi * self.c0 * d;
            g[i] -= wi * self.c0 * d;
            let (v, d) = pw_d(ui - u[0], p);
            e += self.head[i] * v;
            g[i] += wi * self.head[i] * d;
            g[0] -= wi * self.head[i] * d;
            for mm in 1..i {
                let j = i - mm;
                let a = ui - u[j];
                let b = u[j - 1] - u[j];
                let w = &self.omega[mm];
                let (mut s0, mut s1) = (0.0, 0.0);
                for q in 0..CELL_POINTS {
                    let (v, d) = pw_d(a - self.fq[q] * b, p);
                    e += w[q] * v;
                    s0 += w[q] * d;
                    s1 += w[q] * d * self.fq[q];
                }
                // t = u_i - (1-f) u_j - f u_{j-1}
                g[i] += wi * s0;
                g[j] -= wi * (s0 - s1);
                g[j - 1] -= wi * s1;
            }
            total += wi * e;
        }
        (total, g)
    }

    /// Energy and its exact gradient with respect to the free values.
    pub fn value_and_gradient(&self, v: &[f64]) -> (f64, Vec<f64>) {
        let u = self.extend(v);
        let chunks: Vec<std::ops::Range<usize>> = (0..self.m)
            .step_by(CHUNK)
            .map(|a| a..(a + CHUNK).min(self.m))
            .collect();
        let parts: Vec<(f64, Vec<f64>)> = chunks
            .into_par_iter()
            .map(|r| self.chunk_gradient(&u, r))
            .collect();
        let mut total = 0.0;
        let mut gu = vec![0.0; self.m];
        for (e, g) in parts {
            total += e;
            for (a, b) in gu.iter_mut().zip(g) {
                *a += b;
            }
        }
        (total, self.fold_gradient(&gu))
    }

    /// Hessian of the energy with `|t|^{p-2}` replaced by
    /// `(t² + ε²)^{(p-2)/2}`, `ε = eps_rel · max|u|`. Exact for `p = 2`.
    pub fn hessian(&self, v: &[f64], eps_rel: f64) -> DMatrix<f64> {
        let p = self.p;
        let u = self.extend(v);
        let scale = u.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        let eps2 = (eps_rel * scale).powi(2);
        let m = self.m;
        let mut hu = DMatrix::<f64>::zeros(m, m);
        let add2 = |h: &mut DMatrix<f64>, a: usize, b: usize, w: f64| {
            h[(a, a)] += w;
            h[(b, b)] += w;
            h[(a, b)] -= w;
            h[(b, a)] -= w;
        };
        for i in 1..m {
            let wi = self.outer[i];
            let ui = u[i];
            add2(&mut hu, i, i - 1, wi * self.c0 * pw_dd(u[i - 1] - ui, p, eps2));
            add2(&mut hu, i, 0, wi * self.head[i] * pw_dd(ui - u[0], p, eps2));
            for mm in 1..i {
                let j = i - mm;
                let a = ui - u[j];
                let b = u[j - 1] - u[j];
                let w = &self.omega[mm];
                let (mut s00, mut s01, mut s11) = (0.0, 0.0, 0.0);
                for q in 0..CELL_POINTS {
                    let f = self.fq[q];
                    let c = w[q] * pw_dd(a - f * b, p, eps2);
                    s00 += c;
                    s01 += c * f;
                    s11 += c * f * f;
                }
                // gradient of t: e_i - (1-f) e_j - f e_{j-1}
                let (a00, ajj, akk) = (s00, s00 - 2.0 * s01 + s11, s11);
                let (a0j, a0k, ajk) = (-(s00 - s01), -s01, s01 - s11);
                let k = j - 1;
                hu[(i, i)] += wi * a00;
                hu[(j, j)] += wi * ajj;
                hu[(k, k)] += wi * akk;
                hu[(i, j)] += wi * a0j;
                hu[(j, i)] += wi * a0j;
                hu[(i, k)] += wi * a0k;
                hu[(k, i)] += wi * a0k;
                hu[(j, k)] += wi * ajk;
                hu[(k, j)] += wi * ajk;
            }
        }
        // pull back through the ghost map u_{n+j} = c_j v_{n-1}
        let n = self.n;
        let mut h = hu.view((0, 0), (n, n)).into_owned();
        if self.ghost.iter().any(|&c| c != 0.0) {
            let c = &self.ghost;
            let last = n - 1;
            for a in 0..n {
                let cross: f64 = (0..c.len()).map(|j| c[j] * hu[(a, n + j)]).sum();
                h[(a, last)] += cross;
                h[(last, a)] += cross;
            }
            let mut gg = 0.0;
            for (j, cj) in c.iter().enumerate() {
                for (k, ck) in c.iter().enumerate() {
                    gg += cj * ck * hu[(n + j, n + k)];
                }
            }
            h[(last, last)] += gg;
        }
        h
    }
}

/// `∫ |u|^q dx` on the grid: trapezoid in `log r` against `r^N`, a flat head
/// below `r_min`, and the tail per `tail`. Returns the value and its
/// gradient with respect to the grid values.
pub fn lq_power_sum(
    values: &[f64],
    r_min: f64,
    h: f64,
    q: f64,
    tail: TailPolicy,
    prm: &Parameters,
) -> Result<(f64, Vec<f64>)> {
    let n = values.len();
    let nf = prm.dim();
    let s = prm.sphere_nm1;
    let mut w: Vec<f64> = (0..n)
        .map(|i| s * h * (r_min.ln() + i as f64 * h).exp().powf(nf))
        .collect();
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    w[0] += s * r_min.powf(nf) / nf;
    let r_max = (r_min.ln() + (n - 1) as f64 * h).exp();
    match tail {
        TailPolicy::Zero => w[n - 1] += 0.5 * s * h * r_max.powf(nf),
        TailPolicy::Power { exponent } => {
            let d = exponent * q - nf;
            if !(d > 0.0) {
                return Err(Error::Divergent(format!(
                    "power tail r^-{exponent} is not in L^{q} (needs exponent > {})",
                    nf / q
                )));
            }
            w[n - 1] += s * r_max.powf(nf) / d;
        }
    }
    let mut total = 0.0;
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let a = values[i].abs();
        let aq = a.powf(q);
        total += w[i] * aq;
        if a > 0.0 {
            grad[i] = w[i] * q * aq / values[i];
        }
    }
    Ok((total, grad))
}
