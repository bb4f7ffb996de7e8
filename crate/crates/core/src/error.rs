use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by corpus ingestion, fitting and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("mixing weights must sum to 1 (got {sum})")]
    InvalidWeights { sum: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("relevant set must not be empty")]
    EmptyRelevantSet,

    #[error("paired samples must have equal length >= 2 (got {a} and {b})")]
    MismatchedPairs { a: usize, b: usize },

    #[error("algorithm {0} requires tweet text and a content index; not available in scenario 1")]
    ContentUnavailable(String),

    #[error("unknown identifier: {0}")]
    UnknownId(String),

    #[error("index format error: {0}")]
    IndexFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
