//! The parameter triple `(N, s, p)` and the exponents and sphere measures
//! derived from it.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Gamma function at `k/2` for a positive integer `k`, by the exact
/// recursions from `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half needs k >= 1");
    let (mut value, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface measure of the unit sphere `S^{k-1}` sitting in `R^k`.
pub fn sphere_measure(k: u32) -> f64 {
    2.0 * PI.powf(k as f64 / 2.0) / gamma_half(k)
}

/// Volume of the unit ball of `R^k`.
pub fn ball_volume(k: u32) -> f64 {
    PI.powf(k as f64 / 2.0) / gamma_half(k + 2)
}

/// A validated parameter triple. Every field is derived once at
/// construction; the struct is immutable afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parameters {
    #[serde(rename = "N")]
    pub n: u32,
    pub s: f64,
    pub p: f64,
    pub sp: f64,
    /// Critical Sobolev exponent `N p / (N - s p)`.
    pub pstar: f64,
    /// Borderline Lorentz exponent `(p - 1) N / (N - s p)`.
    pub q0: f64,
    /// Decay exponent of the fundamental solution, `(N - s p) / (p - 1)`.
    pub beta_star: f64,
    pub omega_n: f64,
    pub sphere_nm1: f64,
    pub sphere_nm2: f64,
}

impl Parameters {
    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// `N + s p`, the order of the interaction kernel.
    pub fn kernel_order(&self) -> f64 {
        self.dim() + self.sp
    }

    /// Fundamental solution `|x|^{-beta*}`.
    pub fn gamma(&self, r: f64) -> f64 {
        r.powf(-self.beta_star)
    }

    /// Truncated fundamental solution `min{1, |x|^{-beta*}}`.
    pub fn gamma_truncated(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else {
            self.gamma(r)
        }
    }
}

/// Check the standing assumptions and build [`Parameters`].
pub fn validate_params(n: i64, s: f64, p: f64) -> Result<Parameters> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::FractionalOrder(s));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(p));
    }
    let nf = n as f64;
    let sp = s * p;
    if sp >= nf {
        return Err(Error::NotSubcritical { sp, n });
    }
    let k = n as u32;
    Ok(Parameters {
        n: k,
        s,
        p,
        sp,
        pstar: nf * p / (nf - sp),
        q0: (p - 1.0) * nf / (nf - sp),
        beta_star: (nf - sp) / (p - 1.0),
        omega_n: ball_volume(k),
        sphere_nm1: sphere_measure(k),
        sphere_nm2: sphere_measure(k - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_gamma() {
        assert_relative_eq!(gamma_half(1), PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half(2), 1.0);
        assert_relative_eq!(gamma_half(5), 0.75 * PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half(10), 24.0);
    }

    #[test]
    fn sphere_measures() {
        assert_relative_eq!(sphere_measure(1), 2.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_measure(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_measure(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn derived_exponents() {
        let prm = validate_params(3, 0.5, 2.0).unwrap();
        assert_relative_eq!(prm.beta_star, 2.0);
        assert_relative_eq!(prm.pstar, 3.0);
        assert_relative_eq!(prm.q0, 1.5);
        let prm = validate_params(4, 0.3, 3.0).unwrap();
        assert_relative_eq!(prm.beta_star, 1.55, max_relative = 1e-15);
    }

    #[test]
    fn rejections_are_distinct() {
        assert_eq!(validate_params(1, 0.5, 2.0), Err(Error::Dimension(1)));
        assert_eq!(validate_params(3, 1.5, 2.0), Err(Error::FractionalOrder(1.5)));
        assert_eq!(validate_params(3, 0.5, 1.0), Err(Error::Exponent(1.0)));
        assert!(matches!(
            validate_params(3, 0.5, 6.0),
            Err(Error::NotSubcritical { n: 3, .. })
        ));
    }

    #[test]
    fn two_dimensional_equator_is_two_points() {
        let prm = validate_params(2, 0.75, 1.5).unwrap();
        assert_relative_eq!(prm.sphere_nm2, 2.0, max_relative = 1e-15);
    }
}
