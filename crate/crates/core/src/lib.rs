//! Radial numerics for the fractional p-Laplacian
//! `(-Δ_p)^s u(x) = 2 PV ∫ J_p(u(x) - u(y)) |x - y|^{-(N+sp)} dy`.
//!
//! Every quantity is reduced to one-dimensional radial integrals through
//! the angular kernel [`kernel::phi`].

pub mod energy;
pub mod error;
pub mod grid;
pub mod isotonic;
pub mod kernel;
pub mod measure;
pub mod operator;
pub mod params;
pub mod power;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod suite;
pub mod tail;
pub mod variational;

pub use error::{Error, Result};
pub use grid::{make_log_grid, RadialGrid};
pub use kernel::{phi, phi_extended, phi_singularity_ratio};
pub use params::{validate_params, Parameters};
pub use profile::{Radial, RadialProfile, TailPolicy};
pub use quadrature::QuadratureSpec;
pub use tail::{fit_tail_exponent, TailFit};
