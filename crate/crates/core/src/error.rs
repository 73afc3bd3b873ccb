use std::path::PathBuf;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("backbone mismatch: {left:?} vs {right:?}")]
    BackboneMismatch { left: String, right: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid probability set: {0}")]
    InvalidProbabilities(ValidationReport),

    #[error("matrix is not symmetric (max asymmetry {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("input not PSD: eigenvalue {eigenvalue:e} against largest {largest:e}")]
    NotPositiveSemidefinite { eigenvalue: f64, largest: f64 },

    #[error("eigendecomposition of a {dim}x{dim} matrix did not converge")]
    NoConvergence { dim: usize },

    #[error("{0}")]
    Format(#[from] crate::io::gemb::FormatError),

    #[error("{path}: {error}")]
    File { path: PathBuf, error: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Attaches the file the error originated from.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            error: Box::new(self),
        }
    }

    /// The underlying error with any file context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::File { error, .. } => error.root(),
            other => other,
        }
    }
}
