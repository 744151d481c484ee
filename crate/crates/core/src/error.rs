use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of an operation was violated by the caller.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("point has dimension {found}, domain has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("configuration has {size} points, exhaustive enumeration is limited to {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("particle count {count} exceeded the cap {cap} at t = {time}")]
    Explosion { time: f64, count: usize, cap: usize },

    #[error("non-finite density in species {species} at t = {time}")]
    NonFinite { time: f64, species: &'static str },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
