use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("degree mismatch: expected {expected}, got {actual}")]
    DegreeMismatch { expected: usize, actual: usize },

    #[error("degree {degree} is out of range for dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },

    #[error("forms live on different grids")]
    GridMismatch,

    #[error("green solve did not converge after {iterations} iterations (best relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("duality not resolved at this resolution: row {row} has {count} entries above the pairing tolerance")]
    DualityUnresolved { row: usize, count: usize },

    #[error(
        "hodge dual expansion residual {residual:.3e} exceeds {tolerance:.1e}; basis is not strong harmonic enough"
    )]
    ExpansionResidual { residual: f64, tolerance: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
