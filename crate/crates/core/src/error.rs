use thiserror::Error;

use crate::domain::ExactRational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors reported by the library. Letter indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed rational at position {index}: {token:?}")]
    MalformedToken { index: usize, token: String },

    #[error("alphabet needs at least 2 letters, got {count}")]
    TooFewLetters { count: usize },

    #[error("probability of letter {index} must lie strictly between 0 and 1, got {value}")]
    ProbabilityOutOfRange { index: usize, value: String },

    #[error("probabilities must sum to exactly 1, got {sum}")]
    SumNotOne { sum: String },

    #[error("run length of letter {index} must be a positive integer, got {token:?}")]
    InvalidRunLength { index: usize, token: String },

    #[error("run spec has {found} entries but the alphabet has {expected} letters")]
    RunSpecLength { expected: usize, found: usize },

    #[error("j must lie in [1, {r}], got {j}")]
    JOutOfRange { j: usize, r: usize },

    #[error("alphabet size {r} exceeds the limit {limit} for {what}")]
    AlphabetTooLarge {
        r: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("Smirnov function is singular: sum of x/(1+x) equals 1")]
    SingularEvaluation,

    #[error("division by zero: entry {index} of the evaluation point equals -1")]
    DivisionByZero { index: usize },

    #[error("absorbing chain system is singular (some state never absorbs)")]
    SingularSystem,

    #[error("chain invariant violated: {0}")]
    ChainInvariant(String),

    #[error("tolerance not reached after {reached} steps: enclosure [{lower}, {upper}]")]
    TailCapExceeded {
        reached: usize,
        lower: Box<ExactRational>,
        upper: Box<ExactRational>,
    },

    #[error("tail bound unavailable: absorption probability within {steps} steps underflowed")]
    TailBoundUnavailable { steps: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by bad user input rather than broken internal invariants.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::SingularSystem | Error::ChainInvariant(_) | Error::TailBoundUnavailable { .. }
        )
    }
}
