use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not idempotent (defect {defect:.3e})")]
    NotIdempotent { defect: f64 },

    #[error("pointer basis is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate branch: resulting trace {trace:.3e} is below {threshold:.0e}")]
    DegenerateBranch { trace: f64, threshold: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate fit: {valid} valid point(s), at least 2 required")]
    DegenerateFit { valid: usize },

    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures a user fixes by editing the scenario configuration.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Config { .. } | Error::Json(_) => true,
            Error::Scenario { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
