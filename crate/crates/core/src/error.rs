use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("site count {0} outside supported range 1..={1}")]
    SiteCount(usize, usize),

    #[error("site index {index} out of range for {sites} sites")]
    SiteIndex { index: usize, sites: usize },

    #[error("basis index {index} does not fit in {sites} sites")]
    BasisIndex { index: u64, sites: usize },

    #[error("{sites} sites exceeds the enumeration ceiling of {ceiling}")]
    EnumerationCeiling { sites: usize, ceiling: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite parameter at position {0}")]
    NonFiniteParameter(usize),

    #[error("operation requires a normalized ansatz")]
    NotNormalized,

    #[error("operation requires an autoregressive ansatz")]
    NotAutoregressive,

    #[error("sample {0} has zero amplitude under the sampling distribution")]
    ZeroDenominator(usize),

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
