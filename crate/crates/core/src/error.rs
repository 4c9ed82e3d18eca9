use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the classification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: invalid document format (expected a .txt file)")]
    InvalidFormat { path: PathBuf },

    #[error("{path}: document is not valid UTF-8")]
    InvalidEncoding { path: PathBuf },

    #[error("{path}: document is empty")]
    EmptyDocument { path: PathBuf },

    #[error("no word occurs at least twice in the corpus")]
    EmptyVocabulary,

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: label `{label}` is not a registered class")]
    UnknownLabel { line: u64, label: String },

    #[error("no labeled documents")]
    NoLabeledData,

    #[error("no documents given")]
    NoDocuments,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("class sets differ between models")]
    ClassSetMismatch,

    #[error("objective decreased from {previous} to {current} at iteration {iteration}")]
    NonMonotoneObjective {
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("expected complete-data log-likelihood decreased at iteration {iteration}")]
    QFunctionDecrease { iteration: usize },

    #[error("empty value list")]
    EmptyValues,

    #[error("nothing to evaluate")]
    EmptyEvaluation,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("class `{0}` already exists")]
    DuplicateClass(String),

    #[error("corrupt model file (line {line}): {message}")]
    CorruptModel { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
