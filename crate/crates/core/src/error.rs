use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An exact computation would exceed its configured budget.
    #[error("{what}: {count} exceeds the budget of {limit}; {hint}")]
    Resource {
        what: &'static str,
        count: String,
        limit: String,
        hint: &'static str,
    },

    /// Local polynomials handed to the sewing step disagree.
    #[error("inconsistent local polynomials: planes {i} and {j} disagree on monomial set {set:#b}")]
    Inconsistency { i: usize, j: usize, set: u64 },

    /// A structural guarantee that should always hold was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// A truth-table file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
