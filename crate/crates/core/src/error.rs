use thiserror::Error;

use crate::model::{Coalition, SystematicityWitness};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("issue {issue} out of range (structure has {issues} issues)")]
    IssueOutOfRange { issue: usize, issues: usize },

    #[error("voter {voter} out of range (structure has {voters} voters)")]
    VoterOutOfRange { voter: usize, voters: usize },

    #[error("enumeration cap exceeded: {what} needs {needed} bits, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("search space too large: {what} has {size} elements, cap is {cap}")]
    SpaceTooLarge {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("aggregator is not systematic: {0}")]
    NotSystematic(Box<SystematicityWitness>),

    #[error("coalition family is not monotonic: {member} is winning but {superset} is not")]
    NotMonotonic {
        member: Coalition,
        superset: Coalition,
    },

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("unknown issue `{name}` at column {column}")]
    UnknownIssue { name: String, column: usize },

    #[error("formula is not a cube: {0}")]
    NotACube(String),

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("invalid transfer: {0}")]
    InvalidTransfer(String),

    #[error("precondition `{name}` violated: {detail}")]
    Precondition { name: &'static str, detail: String },
}

impl Error {
    pub(crate) fn precondition(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            name,
            detail: detail.into(),
        }
    }
}
