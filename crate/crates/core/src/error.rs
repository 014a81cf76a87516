use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the bandit, tuning and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("empty arm set")]
    EmptyArmSet,

    #[error("arm {index} has norm {norm} > 1")]
    ArmNormExceeded { index: usize, norm: f64 },

    #[error("design matrix is singular; run a warm-up phase before selecting")]
    NeedsWarmup,

    #[error("newton solver did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence {
        iterations: usize,
        grad_norm: f64,
        last: Vec<f64>,
    },

    #[error("value {value} outside interval [{lo}, {hi}] for coordinate {coord}")]
    OutOfBox {
        coord: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}
