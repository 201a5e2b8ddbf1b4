use thiserror::Error;

/// Errors raised by the computation kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("resource limit: requested row {requested} exceeds the configured cap of {cap}")]
    ResourceLimit { requested: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("root certification failed for n = {n}: {clause}")]
    Certification { n: usize, clause: String },

    #[error("unimodality violated for n = {n} at j = {j}")]
    Unimodality { n: usize, j: usize },

    #[error("degenerate variance: the distribution is a point mass")]
    DegenerateVariance,

    #[error("insufficient cumulants: order {needed} required, profile holds up to {available}")]
    InsufficientCumulants { needed: usize, available: usize },

    #[error("variance condition violated: sigma^2/n = {ratio} is below the floor {floor}")]
    ConditionViolation { ratio: f64, floor: f64 },

    #[error("precision insufficient at {bits} bits: {detail}")]
    PrecisionInsufficient { bits: u32, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
