use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension N = {0} is not supported (need N >= 2)")]
    Dimension(i64),
    #[error("fractional order s = {0} must lie strictly inside (0, 1)")]
    FractionalOrder(f64),
    #[error("integrability exponent p = {0} must be greater than 1")]
    Exponent(f64),
    #[error("s*p = {sp} is not below N = {n}: the problem is not subcritical")]
    NotSubcritical { sp: f64, n: i64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("invalid quadrature specification: {0}")]
    Quadrature(String),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("invalid barrier: {0}")]
    Barrier(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
