use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{path}:{line}: invalid `{field}`: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        field: String,
        message: String,
    },

    #[error("integrator produced non-finite amplitudes at step {step} of {total}")]
    IntegratorFailure { step: usize, total: usize },

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
