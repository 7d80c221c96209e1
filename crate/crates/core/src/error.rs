use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {x} outside the side interval (0, {end})")]
    Domain { x: f64, end: f64 },
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("no bracket: {0}")]
    NoBracket(String),
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid problem: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
