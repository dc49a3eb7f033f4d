use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by matrix construction, file parsing, and problem compilation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has {found} entries, expected {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("weight matrix: {0}")]
    InvalidWeight(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("line {line}: malformed header: {msg}")]
    MalformedHeader { line: usize, msg: String },

    #[error("line {line}: ragged row with {found} fields, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: non-numeric token {token:?}")]
    NonNumeric { line: usize, token: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("Gram matrix side {side} exceeds the cap {cap}; export the problem with export-sdpa and use an external solver")]
    GramCapExceeded { side: usize, cap: usize },

    #[error(
        "rectangle cover instance too large ({0}); use the spectral or semidefinite bounds instead"
    )]
    CoverTooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
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
