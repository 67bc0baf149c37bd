use thiserror::Error;

use crate::angular::HalfInteger;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A density block or state failed one of its invariants.
    #[error("validation error ({invariant}): {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },

    /// A multipole table lacks coefficients needed by the operation.
    #[error("incomplete multipole table: missing (S, K) = {}", fmt_missing(.missing))]
    IncompleteTable { missing: Vec<(HalfInteger, u32)> },

    /// Exact integer arithmetic would exceed the configured size budget.
    #[error("exact arithmetic budget exceeded: factorial argument {arg} > {limit}")]
    Overflow { arg: u64, limit: u64 },

    /// A computed quantity violated a property that must hold for valid input.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

fn fmt_missing(missing: &[(HalfInteger, u32)]) -> String {
    missing
        .iter()
        .map(|(s, k)| format!("({s}, {k})"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            invariant,
            detail: detail.into(),
        }
    }
}
