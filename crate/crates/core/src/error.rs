use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown Bohr frequency {0}")]
    UnknownFrequency(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("system is not generic: {0}")]
    NotGeneric(String),
    #[error("oracle capacity exceeded: dimension {dimension} > bound {bound}")]
    CapacityExceeded { dimension: usize, bound: usize },
    #[error("bad cutoff {0}: must be at least 1")]
    BadCutoff(usize),
    #[error("order {order} too large (bound {bound})")]
    OrderTooLarge { order: usize, bound: usize },
    #[error("representations disagree on word {0}")]
    RepresentationMismatch(String),
    #[error("state is not a unit vector")]
    NotNormalized,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
