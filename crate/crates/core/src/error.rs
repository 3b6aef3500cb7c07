use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the solver, tuning and benchmark layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("truncated processing-time matrix: expected {expected} values, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("instance index {index} out of range ({available} instance(s) available)")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("no built-in fixed powers for {0} machines (at most 20); supply powers explicitly")]
    UnsupportedSize(usize),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
