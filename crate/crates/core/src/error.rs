use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An internal invariant failed (e.g. a Gram kernel not preserved by an
    /// operator). Points at a broken bundle or representation.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    /// A unit fiber whose trace form is not positive definite.
    #[error("bundle is not C*: {0}")]
    NotCStar(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}
