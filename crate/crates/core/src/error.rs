//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data for class `{class}`: requested {requested}, available {available}")]
    InsufficientData {
        class: String,
        requested: usize,
        available: usize,
    },

    #[error("insufficient vocabulary: requested {requested} words, only {available} distinct")]
    InsufficientVocabulary { requested: usize, available: usize },

    #[error("invalid triad: {0}")]
    InvalidTriad(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::InsufficientData { .. } => "insufficient-data",
            Error::InsufficientVocabulary { .. } => "insufficient-vocabulary",
            Error::InvalidTriad(_) => "invalid-triad",
            Error::Schema(_) => "schema",
            Error::DegenerateTraining(_) => "degenerate-training",
            Error::Parse(_) => "parse",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
