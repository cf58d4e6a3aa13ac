use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid precision: {0} digits (minimum is 30)")]
    InvalidPrecision(u32),

    #[error("ln of an interval that is not strictly positive")]
    NonPositiveInput,

    #[error("square root of an interval that reaches below zero")]
    NegativeSqrt,

    #[error("division by an interval containing zero")]
    DivisionByZero,

    #[error("interval too wide to certify: {0}")]
    IntervalTooWide(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("rational collision while expanding continued fraction: {0}")]
    RationalCollision(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid Matveev instance: {0}")]
    InvalidInstance(String),

    #[error("dominance violation: {0}")]
    DominanceViolation(String),

    #[error("epsilon not positive after {attempts} convergents")]
    EpsilonExhausted { attempts: usize },

    #[error("invalid reduction problem: {0}")]
    InvalidProblem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    /// Errors that may go away when the computation is repeated with more digits.
    pub fn is_precision_limited(&self) -> bool {
        matches!(
            self,
            Error::IntervalTooWide(_) | Error::PrecisionExhausted(_) | Error::DivisionByZero
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
