//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by validation, domain checks, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Lengths or dimensions of related arguments disagree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Structurally invalid input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Problem size exceeds a guard that keeps enumeration tractable.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
