use thiserror::Error;

/// Errors produced by the geometry, solver and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid roughness profile: {0}")]
    InvalidProfile(String),

    #[error("epsilon must be the inverse of a positive integer, got {0}")]
    InvalidEpsilon(f64),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("value {value} outside admissible range [{min}, {max}]")]
    Range { value: f64, min: f64, max: f64 },

    #[error("free boundary iteration did not converge in {} iterations (last residual {:e})", history.len(), history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { history: Vec<f64> },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
