use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SleError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, SleError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(SleError::Domain(msg.into()))
}
