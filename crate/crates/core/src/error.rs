use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error("missing value at (row {row}, column {column})")]
    MissingValue { row: usize, column: String },

    #[error("non-numeric cell {value:?} at (row {row}, column {column})")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("non-binary target {value:?} at row {row}")]
    NonBinaryTarget { row: usize, value: String },

    #[error("target column {0:?} not found in header")]
    MissingTargetColumn(String),

    #[error("only one class present in target (all {0})")]
    SingleClass(u8),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("split balance unachievable: bad-rate difference {difference:.6} exceeds tolerance {tolerance}")]
    UnbalancedSplit { difference: f64, tolerance: f64 },

    #[error("intercept calibration failed: {0}")]
    Calibration(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("complete or quasi-complete separation detected after {iterations} iterations (max |coefficient| {max_coefficient:.3e})")]
    Separation {
        iterations: usize,
        max_coefficient: f64,
    },

    #[error("operation requires a logit-link model, got {0}")]
    WrongLink(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("malformed document: {0}")]
    Document(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Io,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::Singular(_)
            | Error::Separation { .. }
            | Error::Calibration(_)
            | Error::NonFinite(_) => ErrorClass::Numeric,
            _ => ErrorClass::Validation,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
