//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimension must be 2 or 3, got {0}")]
    UnsupportedDim(usize),
    #[error("resolution on axis {axis} must be an even integer >= 4, got {n}")]
    BadResolution { axis: usize, n: usize },
    #[error("period on axis {axis} must be positive, got {period}")]
    BadPeriod { axis: usize, period: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("fields live on different grids: {0}")]
    GridMismatch(&'static str),
    #[error("sample count {actual} does not match grid size {expected}")]
    SampleCount { expected: usize, actual: usize },
    #[error("non-finite sample at flat index {0}")]
    NonFiniteSample(usize),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("solution families are defined on period-2 cells; axis {axis} has period {period}")]
    PeriodMismatch { axis: usize, period: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no closed-form inertial term is available for family '{0}'")]
    NoClosedFormInertial(&'static str),
    #[error("profile or force series does not cover [0, {t}]; coverage ends at {end}")]
    HorizonNotCovered { t: f64, end: f64 },
    #[error("free-space kernel is singular at t = 0; the t = 0 result is the identity")]
    SingularKernelTime,
    #[error("initial velocity is not divergence-free: sup |div v0| = {0:.3e}")]
    NotSolenoidal(f64),
    #[error("convergence study needs at least 3 resolutions, got {0}")]
    TooFewResolutions(usize),
    #[error("unknown solution family '{0}'")]
    UnknownFamily(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
