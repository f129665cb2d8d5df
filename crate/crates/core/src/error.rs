use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration value, e.g. an unknown IANA zone.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: line {line}, field `{field}`: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Input has data but it cannot be normalized (e.g. all zeros).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid adjustment factor: {0}")]
    InvalidFactor(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Temperature ratio cannot be formed (baseline mean too close to 0 °C).
    #[error("temperature adjustment undefined: {0}")]
    AdjustmentUndefined(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        line: u64,
        field: &str,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}
