use thiserror::Error;

/// Errors raised by the exact dynamics library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("values live in different quadratic fields Q(sqrt({0})) and Q(sqrt({1}))")]
    MixedField(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("point {0} lies outside the domain [0, {1})")]
    OutOfDomain(String, String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid lengths: {0}")]
    InvalidLengths(String),
    #[error("permutation {0} is reducible")]
    Reducible(String),
    #[error("first return not resolved within {0} iterations")]
    CapExceeded(u64),
    #[error("Rauzy-Veech induction undefined at depth {depth}: rightmost discontinuities coincide")]
    NotInGeneralPosition { depth: usize },
    #[error("matrix has a zero column")]
    ZeroColumn,
    #[error("matrix is not positive")]
    NotPositive,
    #[error("step sequence does not return the permutation to itself")]
    NotALoop,
    #[error("Perron root has algebraic degree greater than 2")]
    DegreeTooHigh,
    #[error("index {0} is out of range for this sequence")]
    OutOfRange(u64),
    #[error("radius is not exactly representable; use the enclosure API")]
    Inexact,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no rigidity tower found for stage {stage}")]
    TowerNotFound { stage: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
