use thiserror::Error;

use crate::matcore::CMat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite integrand value at node {node:?}")]
    NonFiniteIntegrand { node: Vec<f64> },

    #[error("quadrature did not converge: delta {delta:e} at n = {nodes} (tolerance {tol:e})")]
    QuadratureNotConverged {
        delta: f64,
        nodes: usize,
        tol: f64,
        previous: Box<CMat>,
        last: Box<CMat>,
    },

    #[error("error norm {norm:e} at t = {t:e} is below the noise floor; use a larger t0")]
    NoiseFloor { t: f64, norm: f64 },

    #[error("Richardson extrapolation diverged (successive corrections {0:?})")]
    Divergent(Vec<f64>),

    #[error("no reading of the palindromic t^4 integral reproduces the direct error (best deviation {0:e})")]
    Calibration(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
