use thiserror::Error;

use crate::valuation::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("precision exhausted in {op}: needed {needed} digits, {available} available")]
    PrecisionExhausted {
        op: &'static str,
        needed: i64,
        available: i64,
    },

    #[error("{op}: argument outside the convergence domain ({detail})")]
    Domain { op: &'static str, detail: String },

    /// A parameter falls outside one of the published admissibility bounds.
    #[error("bound violated: {bound} (got {value})")]
    BoundViolated { bound: String, value: Rational },

    #[error("tower lacks {0}")]
    MissingElement(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("elements belong to different towers")]
    TowerMismatch,

    /// A structural identity that the construction guarantees did not hold.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
