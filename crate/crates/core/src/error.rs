use thiserror::Error;

use crate::hierarchy::Hierarchy;
use crate::hsets::Id;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown element id {0}")]
    UnknownId(Id),

    #[error("relation is not a preorder: {0}")]
    NotPreorder(String),

    #[error("relation is not a partial order: {0}")]
    NotPoset(String),

    #[error("carrier of size {size} exceeds the cap of {cap}")]
    SizeCap { size: usize, cap: usize },

    /// A hierarchy level would exceed the element budget. `partial` holds the
    /// stages completed before the offending one.
    #[error("budget of {limit} elements exhausted at stage {stage}")]
    BudgetExhausted {
        stage: usize,
        limit: usize,
        partial: Option<Box<Hierarchy>>,
    },

    #[error("search budget of {limit} candidates exhausted")]
    SearchBudget { limit: u64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
