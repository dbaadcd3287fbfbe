use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension m = {m} (supported range {min}..={max})")]
    UnsupportedDimension { m: usize, min: usize, max: usize },

    #[error("invalid signature ({p}, {q}) for dimension {m}")]
    InvalidSignature { p: usize, q: usize, m: usize },

    #[error("{what} violates its symmetry identities: max violation {violation:.3e} > {limit:.3e}")]
    Symmetry {
        what: &'static str,
        violation: f64,
        limit: f64,
    },

    #[error("input vectors are not orthonormal: {0}")]
    NotOrthonormal(String),

    #[error("metric is singular at the evaluation point (|det| = {det:.3e})")]
    SingularMetric { det: f64 },

    #[error("the {0} unit pseudo-sphere is empty for this signature")]
    EmptySphere(&'static str),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("gradient of graph function {index} does not vanish at the origin")]
    NonzeroGradient { index: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
