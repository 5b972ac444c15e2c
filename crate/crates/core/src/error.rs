use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have dimension >= 1")]
    Empty,

    #[error("matrix is not Hermitian: max |M - M^dagger| = {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("eigensolver did not converge for a {dim}x{dim} matrix within {iterations} iterations")]
    EigenNoConvergence { dim: usize, iterations: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("coordinates outside chart domain: {0}")]
    OutsideChartDomain(String),

    #[error("singular matrix (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("not a pure state: {0}")]
    NotPure(String),

    #[error("curve needs at least 3 samples, got {0}")]
    TooFewSamples(usize),

    #[error("samples are not uniformly spaced in t")]
    NonUniformSamples,

    #[error("inconsistent decomposition: {0}")]
    InconsistentDecomposition(String),

    #[error("optimizer diverged in restart {restart} at iteration {iteration}: {reason}")]
    OptimizerDiverged {
        restart: usize,
        iteration: usize,
        reason: String,
    },

    #[error("matrix format: {0}")]
    Format(String),
}

pub(crate) fn ensure_same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}
