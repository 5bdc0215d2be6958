use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("all site matrices vanish; the state is null")]
    NullState,
    #[error("physical label {label} out of range for local dimension {dim}")]
    LabelOutOfRange { label: usize, dim: usize },
    #[error("{entries} entries exceed the budget of {budget}")]
    BudgetExceeded { entries: u128, budget: u128 },
    #[error("dominant transfer eigenvalue is degenerate in magnitude ({first} vs {second})")]
    DegenerateDominantEigenvalue { first: f64, second: f64 },
    #[error("gauged left fixed point is not Hermitian (deviation {0:e})")]
    NonDiagonalizableFixedPoint(f64),
    #[error("right fixed point has deficient rank ({rank} < {dim})")]
    RankDeficientFixedPoint { rank: usize, dim: usize },
    #[error("iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("block size {block} does not divide chain length {sites}")]
    BlockMismatch { block: usize, sites: usize },
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("concurrence requires qubits, got local dimension {0}")]
    NotQubits(usize),
    #[error("curve evaluation failed at g = {0}")]
    EvaluationFailed(f64),
    #[error("one-sided derivative diverges on the {0} side")]
    DivergedSide(&'static str),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
