use thiserror::Error;

use crate::field::GroundField;

/// Errors raised by set construction, counting kernels and the pipelines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(GroundField, GroundField),

    #[error("{0} is not a valid prime modulus (need a prime 3 <= p < 2^32)")]
    InvalidPrime(u64),

    #[error("division by zero: {0}")]
    ZeroDivisor(&'static str),

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("set contains zero, which is not allowed for {0}")]
    ZeroElement(&'static str),

    #[error("generated family is not a set of distinct elements: {0}")]
    Collision(String),

    #[error("invalid subgroup order {order} for p = {p} (must divide p - 1)")]
    InvalidSubgroupOrder { p: u64, order: u64 },

    #[error("set too small: need at least {needed} elements, got {got}")]
    TooSmall { needed: usize, got: usize },

    #[error("work cap exceeded: {work} > {cap}")]
    CapExceeded { work: u128, cap: u128 },

    #[error("law mismatch: {0}")]
    LawMismatch(String),

    #[error("parts overlap at element {0}")]
    OverlappingParts(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An internal invariant failed; always a bug in the counting code.
    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
