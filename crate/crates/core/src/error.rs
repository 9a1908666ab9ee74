use thiserror::Error;

use crate::lp::LpStatus;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("indeterminate extended-real operation (+inf) + (-inf)")]
    Indeterminate,
    #[error("simplex iteration limit of {0} exceeded")]
    IterationLimit(usize),
    #[error("linear program is not optimal (status {0:?})")]
    NotOptimal(LpStatus),
    #[error("point is outside the set: {0}")]
    NotMember(String),
    #[error("hamiltonian is {value} at node {node}")]
    InfiniteHamiltonian { node: usize, value: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension {
            context,
            expected,
            got,
        });
    }
    Ok(())
}
