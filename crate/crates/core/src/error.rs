use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A CSV row with a field count different from the first row.
    #[error("ragged row at line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-numeric token {token:?} at line {line}")]
    NonNumeric { line: usize, token: String },

    #[error("no CA atom records found in {path}")]
    NoCaAtoms { path: PathBuf },

    #[error("unparseable coordinate field at line {line}: {field:?}")]
    BadPdbCoordinate { line: usize, field: String },

    /// Precondition violations on operation inputs.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A filtration that violates the face-before-coface contract.
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    /// Diagrams with different numbers of essential (infinite) bars cannot
    /// be compared by the matching metrics.
    #[error("mismatched infinite-bar counts: {left} vs {right}")]
    MismatchedInfiniteBars { left: usize, right: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
