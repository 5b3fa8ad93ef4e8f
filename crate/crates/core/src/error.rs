use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("dual basis is not unique: ambient dimension {ambient} exceeds rank {rank}; pass coordinates of the semisimple span")]
    NotSemisimple { ambient: usize, rank: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("descriptor rejected: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("descriptor is not wavefront")]
    NotWavefront,
    #[error("infeasible lift: {0}")]
    InfeasibleLift(String),
    #[error("unknown catalog entry `{name}`; available: {}", .available.join(", "))]
    UnknownEntry { name: String, available: Vec<String> },
    #[error("point lies outside the negative chamber")]
    OutsideChamber,
    #[error("singular matrix")]
    Singular,
    #[error("unsupported realization: {0}")]
    Unsupported(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("subalgebra basis is not closed under the bracket (residual {0:e})")]
    NotClosed(f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
