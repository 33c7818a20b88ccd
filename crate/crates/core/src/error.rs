use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A curve evaluated to a non-finite value or violates the exposure-curve definition.
    #[error("invalid exposure curve at z = {z}: {reason}")]
    InvalidCurve { z: f64, reason: String },

    /// An inner function does not satisfy the link condition set.
    #[error("not an exposure curve: `{inequality}` violated at z = {z}")]
    NotExposureCurve { inequality: String, z: f64 },

    /// A parameter lies outside its admissible domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// The distribution puts all of its mass on the censoring point or the
    /// parametrization is singular.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("invalid mixture weights: {0}")]
    Weight(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Adaptive quadrature ran out of recursion depth.
    #[error("quadrature did not reach the requested accuracy (best estimate {estimate})")]
    Accuracy { estimate: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
