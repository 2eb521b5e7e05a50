use thiserror::Error;

/// Errors raised by the library. Violations of mathematical preconditions
/// are reported as [`Error::Precondition`]; [`Error::Internal`] means a
/// result contradicted a proven identity and indicates a bug.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("forbidden direction: {0}")]
    ForbiddenDirection(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
