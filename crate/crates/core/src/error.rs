use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A structure violates its invariants (index out of range, bad derived variable, ...).
    #[error("structure error: {0}")]
    Structure(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The operation would produce a system with no equations or no variables.
    #[error("empty system: {0}")]
    EmptySystem(String),

    /// Matching on the effective pattern only bounds the generic rank from above
    /// when derived variables are present.
    #[error("structure has derived variables; use the randomized generic-rank estimator instead")]
    DerivedVariables,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Curve tracing needs a one-dimensional solution set at the start point.
    #[error("solution set has local dimension {found} at the start point, expected {expected}")]
    WrongDimension { expected: usize, found: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),
}

impl Error {
    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Errors caused by bad user input rather than a failed analysis.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Io { .. }
                | Error::InvalidArgument(_)
                | Error::UnknownDataset(_)
                | Error::Structure(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        let full = err.to_string();
        let suffix = format!(" at line {} column {}", err.line(), err.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message,
        }
    }
}
