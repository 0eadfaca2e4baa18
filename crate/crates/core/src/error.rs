use thiserror::Error;

/// Errors raised by every module of the engine.
///
/// Variants are grouped by what went wrong so that front ends can map them
/// onto stable exit codes through [`Error::category`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),
    #[error("mapping {0:?} is not a bijection on 0..{len}", len = .0.len())]
    NotABijection(Vec<usize>),
    #[error("expected {expected} entries, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("pool index {index} out of range for {pool_count} pools")]
    PoolOutOfRange { index: usize, pool_count: usize },
    #[error("operands belong to different groups")]
    ParamsMismatch,

    #[error("group of order {order} exceeds the cap of {cap} elements")]
    GroupTooLarge { order: String, cap: u64 },
    #[error("subgroup closure exceeded the cap of {cap} elements")]
    ClosureExceedsCap { cap: u64 },
    #[error("configuration space of size {size} exceeds the cap of {cap}")]
    StateSpaceTooLarge { size: String, cap: u64 },
    #[error("value {value} exceeds the supported bound {bound}")]
    TooLarge { value: u64, bound: u64 },
    #[error("tables of size {0} exceed the exhaustive isomorphism bound")]
    TooLargeForExhaustive(usize),

    #[error("order must be positive")]
    NonPositive,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {prime} does not divide the order {order}")]
    PrimeNotPresent { prime: u64, order: String },
    #[error("{subgroup} does not divide {group}")]
    NotADivisor { group: String, subgroup: String },
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),

    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("event {event}: {message}")]
    InvariantViolation { event: usize, message: String },
    #[error("event {event}: node {node} is in pool {actual}, but the event says it leaves pool {claimed}")]
    SourceMismatch {
        event: usize,
        node: usize,
        claimed: usize,
        actual: usize,
    },
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Malformed values handed to a constructor.
    InvalidInput,
    /// An enumeration or closure would exceed its size cap.
    CapExceeded,
    /// A mathematical precondition (divisibility, primality) does not hold.
    Precondition,
    /// A trace or serialized value failed validation.
    InvalidData,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InvalidParams(_) | InvalidProbability(_) | InvalidTable(_) => ErrorCategory::InvalidInput,
            NotABijection(_) | LengthMismatch { .. } | PoolOutOfRange { .. } | ParamsMismatch => {
                ErrorCategory::InvalidData
            }
            GroupTooLarge { .. }
            | ClosureExceedsCap { .. }
            | StateSpaceTooLarge { .. }
            | TooLarge { .. }
            | TooLargeForExhaustive(_) => ErrorCategory::CapExceeded,
            NonPositive | NotPrime(_) | PrimeNotPresent { .. } | NotADivisor { .. } => {
                ErrorCategory::Precondition
            }
            MalformedLine { .. } | InvariantViolation { .. } | SourceMismatch { .. } => {
                ErrorCategory::InvalidData
            }
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
