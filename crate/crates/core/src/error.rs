use thiserror::Error;

/// Errors shared by every analysis module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A value that should satisfy a numerical invariant (hermiticity,
    /// positivity, ...) does not.
    #[error("numerical domain error: {0}")]
    Numerical(String),
    /// The requested channel/correlation combination is not modelled.
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    /// A computed quantity disagrees with its closed-form value.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

/// Validates a probability-like parameter.
pub(crate) fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        argument(format!("{name} must lie in [0, 1], got {value}"))
    }
}
