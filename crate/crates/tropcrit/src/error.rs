//! Error type shared across the solver.

/// Errors reported by series arithmetic, the rational-geometry engine and the
/// critical-point solver.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("leading coefficient of the zero series is undefined")]
    CoeffOfZero,

    #[error("exp requires a series of strictly positive valuation")]
    NonPositiveValuation,

    #[error("log requires a series with leading term 1 at exponent 0")]
    NotUnitLeading,

    #[error("reciprocal requires a series with positive leading coefficient")]
    NonPositiveLeading,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no point of the form (c, 0) lies in the convex hull")]
    NoPointAboveZero,

    #[error("target point does not lie in the convex hull")]
    TargetNotInHull,

    #[error("subspace is not transversal to the distinguished axis")]
    NotTransversal,

    #[error("subspace has dimension {got}, expected {expected}")]
    WrongDimension { expected: usize, got: usize },

    #[error("Laurent polynomial is not complete: {0}")]
    NotComplete(&'static str),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("iteration limit reached after {iterations} steps (gradient norm {grad_norm:e})")]
    MaxIterExceeded { iterations: usize, grad_norm: f64 },

    #[error("lift step made no progress; residual valuation stalled at {at}")]
    StalledProgress { at: String },

    #[error("ray {index} is not primitive")]
    NonPrimitiveRay { index: usize },

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("pullback is not a Laurent polynomial: {0}")]
    NotLaurent(String),

    #[error("pullback has a coefficient that is not positive")]
    NotPositive,
}

pub type Result<T> = std::result::Result<T, Error>;
