use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] lakm_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed result document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed config file: {0}")]
    Toml(#[from] toml::de::Error),
}

impl BenchError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }

    /// Process exit status: 1 for configuration problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Toml(_) => 1,
            BenchError::Core(lakm_core::Error::Config(_)) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
