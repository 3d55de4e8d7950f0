use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("nonlinearity exponent m = {0} must lie strictly inside (0, 1)")]
    InvalidExponent(f64),
    #[error("dimension N = {0} must be at least 1")]
    InvalidDimension(usize),
    #[error("tau = {tau} outside ({lower}, 1]")]
    TauOutOfRange { tau: f64, lower: f64 },
    #[error("non-finite coefficient: {0}")]
    NonFiniteCoefficient(&'static str),
    #[error("condition (ab) violated: feasible lambda interval is empty")]
    EmptyInterval,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("grid too coarse: axis {axis} has {nodes} nodes, need at least 3")]
    GridTooCoarse { axis: usize, nodes: usize },
    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value at node {0}")]
    NonFiniteValue(usize),
    #[error("sphere of radius {rho} around {x0:?} does not meet the grid")]
    SphereOutsideGrid { x0: Vec<f64>, rho: f64 },
    #[error("radius {rho} below the resolvable minimum {min}")]
    RadiusTooSmall { rho: f64, min: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Newton diverged at eps = {eps:e}: residual {residual:e} not reduced after damping")]
    NewtonDiverged { eps: f64, residual: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolveFailed(String),
    #[error("non-finite value encountered during solve at eps = {eps:e}")]
    NonFiniteEncountered { eps: f64 },
    #[error("precondition violated at sample {index} (rho = {rho}): {reason}")]
    PreconditionViolated { index: usize, rho: f64, reason: String },
    #[error("trace-constant family is empty")]
    EmptyFamily,
    #[error("snapshot parse error at line {line}: {message}")]
    Snapshot { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
