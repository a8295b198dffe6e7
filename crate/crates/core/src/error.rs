use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unit ball of {0} is not polytopal")]
    NotPolytopal(String),

    #[error("combinatorial blowup: {count} points exceed the cap of {cap}")]
    CombinatorialBlowup { count: u128, cap: u128 },

    #[error("{0} requires euclidean spaces")]
    NonEuclidean(String),

    #[error("complex scalars are not supported by {0}")]
    ComplexUnsupported(&'static str),

    #[error("scalar fields of domain and codomain disagree")]
    ScalarMismatch,

    #[error("problem is infeasible")]
    Infeasible,

    #[error("problem is unbounded")]
    Unbounded,

    #[error("numerical failure: {message} (condition estimate {condition:e})")]
    NumericalFailure { message: String, condition: f64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("memory guard: {entries} coefficients exceed the limit of {limit}")]
    MemoryGuard { entries: u128, limit: u128 },

    #[error("T(K) is not contained in L (worst facet value {0})")]
    NotContained(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
