use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution parameter violates its family's constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A grid, frequency grid or iteration setting is unusable.
    #[error("configuration error: {0}")]
    Config(String),
    /// A value lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A shifted frequency index falls outside the sampled range.
    #[error("range error: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
