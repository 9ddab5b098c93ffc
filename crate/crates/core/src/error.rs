use thiserror::Error;

/// Errors raised by the laboratory. Each variant maps onto one CLI exit class.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A request exceeds a documented implementation limit.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// An integer was looked up outside the segment that holds it.
    #[error("range error: {0}")]
    Range(String),
    /// A factorization does not multiply back to its integer.
    #[error("integrity error: {0}")]
    Integrity(String),
    /// A numerical procedure failed to produce a trustworthy value.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Malformed textual input (spec strings, config files, expressions).
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed input that violates a structural requirement.
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
