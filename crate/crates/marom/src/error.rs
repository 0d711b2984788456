//! Error type shared by all modules of the crate.

use std::path::PathBuf;

/// Errors produced by dataset handling, model training, and prediction.
#[derive(Debug, thiserror::Error)]
pub enum MaRomError {
    /// Filesystem failure while reading or writing an artifact.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A CSV cell could not be parsed. Row and column are 1-based.
    #[error("malformed CSV in {path} at row {row}, column {col}: {detail}")]
    MalformedCsv {
        path: PathBuf,
        row: usize,
        col: usize,
        detail: String,
    },

    /// A parsed value is NaN or infinite. Row and column are 1-based.
    #[error("non-finite value in {path} at row {row}, column {col}")]
    NonFinite {
        path: PathBuf,
        row: usize,
        col: usize,
    },

    /// A JSON manifest or model file failed to deserialize.
    #[error("malformed JSON in {path}: {detail}")]
    MalformedJson { path: PathBuf, detail: String },

    /// Two linked objects disagree on a dimension.
    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The data admits no well-defined answer (zero variance, empty trend, ...).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// A numerical routine failed beyond repair (factorization, optimizer).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, MaRomError>;

impl MaRomError {
    /// Coarse classification used by the CLI to pick an exit code:
    /// `true` for numerical failures, `false` for data/input problems.
    pub fn is_numerical(&self) -> bool {
        matches!(self, MaRomError::Numerical(_))
    }
}
