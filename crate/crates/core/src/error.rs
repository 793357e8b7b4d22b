use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("unknown atomic level `{0}` (expected one of 0, 1, r, r', s)")]
    UnknownLevel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("partial trace needs at least one factor to keep")]
    EmptyKeepSet,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator `{label}` is not unitary (max |U^dag U - I| = {deviation:.3e})")]
    NonUnitary { label: String, deviation: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e} V)")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("field grid has no zero-point normalization")]
    Unnormalized,

    #[error("configuration key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
