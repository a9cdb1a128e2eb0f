use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong shape, non-finite entries, mismatched dimensions.
    #[error("invalid input: {0}")]
    Input(String),

    /// Input that is well formed but outside what the operation handles.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A configuration field failed validation; `path` is the JSON path of the field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("linear algebra backend failed: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}
