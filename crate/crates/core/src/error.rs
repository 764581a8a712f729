use thiserror::Error;

use crate::gcm::GcmError;

/// Crate-wide error type. Each variant maps onto one of the CLI exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("invalid generalised Cartan matrix: {0}")]
    Gcm(#[from] GcmError),
    #[error("window exceeded: {0}")]
    WindowExceeded(String),
    #[error("integral form defect: {0}")]
    IntegralDefect(String),
    #[error("property violation: {0}")]
    Violation(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

impl Error {
    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) | Error::Gcm(_) => 1,
            Error::WindowExceeded(_) => 2,
            Error::IntegralDefect(_) | Error::Violation(_) => 3,
            Error::Unsupported(_) => 4,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
