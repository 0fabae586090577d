use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("w = {0} lies within 1e-12 of a pole 2*pi*i*k of the generating function")]
    Pole(Complex64),

    #[error("tau = {0} is too close to an endpoint of [0, 1] for the rational correction; use the shifted tau = 0 evaluation instead")]
    EndpointTau(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Bernoulli degree {requested} exceeds the cap {cap}")]
    DegreeCap { requested: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("singular matrix encountered ({0})")]
    Singular(&'static str),

    #[error("dimension {0} exceeds the dense cap of {1}")]
    DenseCap(usize, usize),

    #[error("exponential evaluator failed: {0}")]
    Evaluator(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
