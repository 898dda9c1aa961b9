use std::fmt;

use thiserror::Error;

/// Which group of people a row, proposal or predicate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Men,
    Women,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Men => Side::Women,
            Side::Women => Side::Men,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Men => "men",
            Side::Women => "women",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A rating row is not a permutation of `1..=n`. `row` is 1-based.
    #[error("{side} row {row} is not a permutation of 1..={n}")]
    InvalidRow { side: Side, row: usize, n: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("profile index {value} is out of range for n={n} (space size {size})")]
    IndexOutOfRange { n: usize, value: String, size: String },

    #[error("size mismatch: expected n={expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{formula} is not defined for n={n}: {reason}")]
    Domain {
        formula: String,
        n: usize,
        reason: String,
    },

    #[error(
        "refusing to enumerate {profiles} profiles without --force \
         (estimated {estimated_seconds} s of single-core time)"
    )]
    GuardExceeded {
        profiles: String,
        estimated_seconds: u64,
    },

    #[error("census interrupted; partial results discarded")]
    Interrupted,

    #[error("unknown sequence {0}")]
    UnknownSequence(String),

    #[error("unknown formula {0}")]
    UnknownFormula(String),

    #[error("{id} term at index {index} is gated behind a full n={n} census")]
    Gated { id: String, index: usize, n: usize },

    #[error("{id} term at index {index} is stored-only and not reproduced")]
    StoredOnly { id: String, index: usize },

    #[error("sequence registry: {0}")]
    Registry(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
