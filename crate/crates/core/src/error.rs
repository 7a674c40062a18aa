use thiserror::Error;

/// Errors raised by the solver stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate})")]
    PowerIteration { iterations: usize, estimate: f64 },

    #[error("iterative least squares did not converge after {iterations} iterations")]
    LeastSquares { iterations: usize, residual_history: Vec<f64> },

    #[error("cannot complete basis: achieved rank {achieved} of {required}")]
    RankDeficient { achieved: usize, required: usize },

    #[error("matrix too large for dense factorization ({rows}x{cols}, limit {limit})")]
    TooLarge { rows: usize, cols: usize, limit: usize },

    #[error("non-finite value in {what} at coordinate {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("MPS parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("time limit reached")]
    TimeLimit,

    #[error("subproblem failed: {0}")]
    Subproblem(String),

    #[error("trajectory recorded with stride {0}; phase segmentation needs stride 1")]
    Strided(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
