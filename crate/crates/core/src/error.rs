//! Shared error type.
//!
//! Two categories only: `Input` for malformed or mismatched arguments
//! (wrong shapes, out-of-domain points, unparseable documents) and
//! `Precondition` for well-formed inputs that violate an operation's
//! contract (e.g. a non-associative tensor passed where an algebra point
//! is required). Outcomes like "no unit exists" or "projection did not
//! converge" are not errors; they are reported in the result types.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("precondition error: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
