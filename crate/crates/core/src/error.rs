use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("generator domain error at {point:?}: {reason}")]
    GeneratorDomain { point: Vec<f64>, reason: String },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid scale vectors: {0}")]
    InvalidScales(String),

    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),

    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),

    #[error("unrecoverable region: {0}")]
    Unrecoverable(String),

    #[error("component CDF vanishes inside the requested grid at t = {at}; shrink the domain")]
    ShrinkDomain { at: f64 },

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
