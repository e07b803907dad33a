use thiserror::Error;

/// Errors raised by the geometry, quadrature and spectral pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed textual or JSON input; `field` names the offending entry.
    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// A configured size cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Factorization failed or a residual exceeded its hard threshold.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("accuracy not reached: {0}")]
    Accuracy(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Geometry(_) | Error::Input(_) | Error::Domain(_) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
