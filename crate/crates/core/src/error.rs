use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a morphism: {0}")]
    NotIntertwining(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
    /// An object or configuration falls outside the stored universe.
    #[error("outside universe bound: {0}")]
    Boundary(String),
    #[error("corrupt universe file: {0}")]
    Corrupt(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
