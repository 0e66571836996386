//! Error type shared by the numerical modules.

use thiserror::Error;

/// Errors raised by rule construction, transforms and frame operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical precondition does not hold, e.g. a quadrature rule whose
    /// exactness degree is too low for the requested operation.
    #[error("numerical precondition failed: {0}")]
    Precondition(String),

    /// Geometry too close to a singular configuration to evaluate.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// An internal iteration failed to converge.
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
