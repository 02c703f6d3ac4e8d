use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the clustering toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated an operation's precondition (shape, range, emptiness).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine did not reach its tolerance.
    #[error("{message} (off-diagonal norm {off_norm:e})")]
    Numerical { message: String, off_norm: f64 },

    /// The data carries no information for the requested operation.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// A configuration that cannot be satisfied.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input file; `position` is a 1-based line or 0-based record index.
    #[error("{path}: {what} {position}: {message}", path = path.display())]
    Format {
        path: PathBuf,
        what: &'static str,
        position: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn at_line(path: &std::path::Path, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.to_path_buf(),
            what: "line",
            position: line,
            message: msg.into(),
        }
    }

    pub(crate) fn at_record(path: &std::path::Path, record: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.to_path_buf(),
            what: "record",
            position: record,
            message: msg.into(),
        }
    }

    /// Line or record position for format errors.
    pub fn position(&self) -> Option<usize> {
        match self {
            Error::Format { position, .. } => Some(*position),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
