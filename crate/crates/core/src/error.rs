use thiserror::Error;

/// Errors raised by the evaluation, geometry and flow layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("barrier singularity: |q{index}| = {value:e} is inside the 1/q^2 wall guard")]
    BarrierSingularity { index: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("chart domain error: {0}")]
    ChartDomain(String),

    #[error("jacobian of the coordinate map is singular: {0}")]
    JacobianSingular(String),

    #[error("metric is degenerate (kappa2 = 0); Gaussian curvature is undefined")]
    DegenerateMetric,

    #[error("invalid signature component {0}; expected one of -1, 0, 1")]
    InvalidSignature(i64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("base/fiber split requires a degenerate metric (kappa2 = 0), got kappa2 = {0}")]
    NotDegenerate(i8),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
