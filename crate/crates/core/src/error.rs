use thiserror::Error;

/// Errors raised by the numeric and parsing layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A curve specification string could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// The operation is not available for this kind of curve.
    #[error("unsupported curve: {0}")]
    Unsupported(String),
    /// An iterative numeric routine failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn require_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        domain(format!("{what} must be finite, got {x}"))
    }
}
