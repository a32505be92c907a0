use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the function (n < 1, alpha <= 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data. `line` is 1-based; 0 when no line applies.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The operation is not applicable to the data it was given.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
