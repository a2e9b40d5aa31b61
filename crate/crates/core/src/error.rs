use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("labels must be ±1 for the {0} loss")]
    InvalidLabels(&'static str),

    #[error("invalid problem instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {0} is not free in this node")]
    IndexNotFree(usize),

    #[error("n too large for brute force: n = {n}, max_n = {max_n}")]
    TooLarge { n: usize, max_n: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
