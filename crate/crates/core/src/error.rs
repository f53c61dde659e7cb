use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid topology: {}", .0.join("; "))]
    InvalidTopology(Vec<String>),

    /// Arity or shape mismatch between a topology and the data supplied for it.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("resource limit exceeded: {what} requires {size}, cap is {cap}")]
    ResourceLimit { what: String, size: u128, cap: u128 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NetworkError>;
