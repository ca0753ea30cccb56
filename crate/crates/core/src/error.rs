use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("oracle refused: {0}")]
    OracleRefusal(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("largest eigenvalue is not simple (gap {0:e})")]
    DegenerateTop(f64),

    #[error("point lies outside the set where the largest curvature is positive (kappa_1 = {0})")]
    OutsideOmega(f64),

    #[error("chart error: {0}")]
    Chart(String),

    #[error("admissibility breach at node {node}: {detail}")]
    Admissibility { node: usize, detail: String },

    #[error("singular linearization (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("line search underflow after {iterations} iterations (residual {residual:e})")]
    LineSearchUnderflow { iterations: usize, residual: f64 },

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
