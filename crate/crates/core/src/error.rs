use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameter set violates a precondition of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Regime tag does not match the pole location.
    #[error("regime mismatch: a0={a0} is outside the {expected} range")]
    RegimeMismatch { a0: f64, expected: &'static str },

    /// A simulated sample or matrix entry left the representable f64 range.
    #[error("overflow: |value| exceeded f64 range at step {step}")]
    Overflow { step: usize },

    /// Least-squares denominator sum(y_t^2) is exactly zero.
    #[error("degenerate denominator: sum of squared regressors is zero")]
    DegenerateDenominator,

    /// A numerical routine failed to converge or lost positive definiteness.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
