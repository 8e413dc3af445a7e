use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AwError {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("overflow while evaluating {0}")]
    Overflow(String),

    #[error("negative squared coefficient {value:e} at {location}")]
    NegativeWeight { location: String, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("operator leaks out of eigenspace {block} (residual {residual:e})")]
    EigenspaceLeakage { block: usize, residual: f64 },

    #[error("spectrum matching failed: {0}")]
    SpectrumMatch(String),

    #[error("denominator pole at term {0}")]
    Pole(usize),

    #[error("series is not balanced (relative defect {0:e})")]
    BalanceViolation(f64),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("stencil coefficient leaves the grid: {0}")]
    IndexError(String),
}

pub type Result<T> = std::result::Result<T, AwError>;
