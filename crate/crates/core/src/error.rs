use thiserror::Error;

/// Failure modes shared by every module.
///
/// The variants map one-to-one onto the CLI exit codes, so keep them coarse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdenError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("representation error: {0}")]
    Representation(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
}

pub type Result<T, E = EdenError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> EdenError {
    EdenError::InvalidInput(msg.into())
}

pub(crate) fn capacity(msg: impl Into<String>) -> EdenError {
    EdenError::Capacity(msg.into())
}
