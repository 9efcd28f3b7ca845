use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: u64, m: u64 },

    /// A grid point where the congruence family holds but its conclusion
    /// does not. Seeing this means the classifier found a counterexample.
    #[error("theorem violation at n={n}, q={q}: congruences hold but {reason}")]
    TheoremViolation { n: u64, q: u64, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
