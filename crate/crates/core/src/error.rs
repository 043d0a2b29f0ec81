//! Error type shared by all modules.

use std::fmt;

/// Errors produced by q-calculus, order-statistic, and Heine-process routines.
#[derive(Debug, Clone, PartialEq)]
pub enum QError {
    /// An argument lies outside the mathematical domain of the operation.
    Domain(String),
    /// An enumeration or evaluation exceeds the configured size cap.
    Size(String),
    /// A computation produced a non-finite intermediate or final value.
    Numeric(String),
    /// A nested integration region has a shape the evaluator cannot handle.
    UnsupportedRegion(String),
    /// A rejection sampler accepted too few records to form an estimate.
    InsufficientAcceptance { accepted: u64, required: u64 },
}

impl fmt::Display for QError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QError::Domain(msg) => write!(f, "domain error: {msg}"),
            QError::Size(msg) => write!(f, "size error: {msg}"),
            QError::Numeric(msg) => write!(f, "numeric error: {msg}"),
            QError::UnsupportedRegion(msg) => write!(f, "unsupported region: {msg}"),
            QError::InsufficientAcceptance { accepted, required } => write!(
                f,
                "insufficient acceptance: {accepted} accepted records, need at least {required}"
            ),
        }
    }
}

impl std::error::Error for QError {}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, QError>;
