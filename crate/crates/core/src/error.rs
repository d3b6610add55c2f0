use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument does not hold.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("graph is disconnected: {0}")]
    Disconnected(String),

    #[error("no positive spectrum among the leading {0} eigenvalues")]
    NoPositiveSpectrum(usize),

    #[error("empty selection: {0}")]
    Empty(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("bad file format in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
