use thiserror::Error;

use crate::model::ModeKind;
use crate::rat::Rat;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("packed items occupy {total}, exceeding the unit capacity")]
    CapacityExceeded { total: Rat },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("policy or adversary expects {expected:?} costs, got {actual:?}")]
    ModeMismatch { expected: ModeKind, actual: ModeKind },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("history is not a play of this adversary: {0}")]
    InvalidHistory(String),

    #[error("brute force is limited to {max} items, got {n}")]
    TooLarge { n: usize, max: usize },
}
