use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spectral parameter outside the admissible domain: {0}")]
    Domain(String),
    #[error("square-root branch undefined: {0}")]
    BranchUndefined(String),
    #[error("singular resolvent: {0}")]
    Singular(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("operation is a no-op: {0}")]
    NoOp(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph structure violated: {0}")]
    Structure(String),
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
