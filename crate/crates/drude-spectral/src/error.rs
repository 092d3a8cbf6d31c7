//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the spectral toolkit and the time-domain oracle.
#[derive(Debug, Error)]
pub enum DrudeError {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation exists but is not available for these parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A quantity that must be inverted vanished.
    #[error("singularity: {0}")]
    Singular(String),
    /// Two fields or a field and a layout do not share the same grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// The requested time step violates the stability bound.
    #[error("CFL violation: {0}")]
    Cfl(String),
    /// A configuration value is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Reading or writing an artifact failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Serializing a sidecar or summary failed.
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, DrudeError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(DrudeError::Domain(msg.into()))
}
