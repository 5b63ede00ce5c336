use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FqgError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("disconnected: {0}")]
    Disconnected(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, FqgError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FqgError::InvalidParameter(msg.into()))
}
