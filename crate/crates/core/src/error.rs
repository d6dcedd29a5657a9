use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the fitting, risk and experiment routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The normal-equation matrix is not numerically positive definite.
    #[error("singular design{}: {reason}", level.map(|m| format!(" at skeleton level {m}")).unwrap_or_default())]
    SingularDesign { level: Option<usize>, reason: String },

    #[error("stratified sample has no usable data for skeleton level {level}")]
    InsufficientStrata { level: usize },

    #[error("descent did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    Convergence {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
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

    /// True for failures of the numerical routines themselves, as opposed to
    /// bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::SingularDesign { .. } | Error::InsufficientStrata { .. } | Error::Convergence { .. } => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Trial { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
