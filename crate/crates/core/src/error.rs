use thiserror::Error;

/// Errors raised by the simulation library.
///
/// The variants map onto the command-line exit codes: `Usage`, `Domain`,
/// `Integrity`, `Unsupported` and `Config` are configuration problems (exit 2),
/// `Resource` is a budget problem (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {message} (suggestion: {suggestion})")]
    Resource { message: String, suggestion: String },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>, suggestion: impl Into<String>) -> Self {
        Error::Resource {
            message: msg.into(),
            suggestion: suggestion.into(),
        }
    }
}
