use thiserror::Error;

use crate::hilbert::Vector;
use crate::schemes::ScheduleViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid convex set: {0}")]
    InvalidSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("intersection projection did not converge after {iterations} iterations (residual {residual:e})")]
    ProjectionNotConverged {
        iterations: usize,
        residual: f64,
        last: Vector,
    },

    #[error("point lies outside the domain (distance {distance:e})")]
    OutsideDomain { distance: f64 },

    #[error("sampler produced {produced} of {requested} points after {attempts} attempts")]
    SamplerFailure {
        requested: usize,
        produced: usize,
        attempts: usize,
    },

    #[error("{strategy} inner solver stopped after {iterations} iterations with error bound {residual:e}")]
    InnerSolver {
        strategy: &'static str,
        iterations: usize,
        residual: f64,
        last: Vector,
    },

    #[error("strategy {strategy} cannot be used for {family}")]
    StrategyMismatch {
        strategy: &'static str,
        family: &'static str,
    },

    #[error("linear system rI + rA is singular; A is not positive semidefinite")]
    SingularSystem,

    #[error("point is not a fixed point (residual {residual:e})")]
    NotFixedPoint { residual: f64 },

    #[error("reference point is not certified: {0}")]
    NotCertified(String),

    #[error("class {0} needs a fixed point; use is_quasi_nonexpansive")]
    NeedsFixedPoint(&'static str),

    #[error("{0}")]
    Schedule(#[from] ScheduleViolation),

    #[error("scheme {scheme}: {reason}")]
    SchemeNotApplicable { scheme: &'static str, reason: String },

    #[error("trace holds no iterates (thin mode or empty)")]
    MissingIterates,
}
