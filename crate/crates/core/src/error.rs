use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent arguments (dimension mismatch, wrong form
    /// parameter, index out of range, ...).
    #[error("input error: {0}")]
    Input(String),
    /// The input is well formed but outside what the algorithm handles.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// A bounded search was exhausted without a result.
    #[error("not found: {0}")]
    NotFound(String),
    /// The requested computation exceeds a configured size limit.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
