use thiserror::Error;

/// Errors raised by constructors and validators across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown element name `{0}`")]
    UnknownName(String),
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("cover relation contains a cycle: {}", .0.join(" < "))]
    Cycle(Vec<String>),
    #[error("{what} has size {size}, above the supported bound {bound}")]
    TooLarge {
        what: &'static str,
        size: usize,
        bound: usize,
    },
    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("not distributive: {0}")]
    NotDistributive(String),
    #[error("invalid nucleus: {0}")]
    InvalidNucleus(String),
    #[error("subset is not {expected}: {detail}")]
    WrongSubsetKind {
        expected: &'static str,
        detail: String,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("diagram is not functorial: {0}")]
    NotFunctorial(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
