use thiserror::Error;

/// Failure modes shared by every kernel in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("parameter g = {g} is outside the open interval (-2, 2)")]
    OutOfRange { g: f64 },
    #[error("operation requires a nonzero vector")]
    ZeroVector,
    #[error("vector lies on the axis or in the base plane (q = {q}, Z = {z})")]
    OnAxis { q: f64, z: f64 },
    #[error("vectors are collinear (u = {u})")]
    Collinear { u: f64 },
    #[error("chord endpoints coincide")]
    DegenerateChord,
    #[error("angle {alpha} reaches or exceeds a straight angle; no two-point chord exists")]
    ReflexAngle { alpha: f64 },
    #[error("numerical domain violated in {quantity}: {value}")]
    NumericalDomain { quantity: &'static str, value: f64 },
    #[error("no root found in the admissible bracket")]
    NoRoot,
    #[error("pair is not acute (angle {alpha})")]
    ObtuseInput { alpha: f64 },
    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("non-finite component in input")]
    NonFinite,
}

impl GeometryError {
    /// True for errors caused by malformed input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            GeometryError::OutOfRange { .. }
                | GeometryError::ZeroVector
                | GeometryError::DimensionMismatch { .. }
                | GeometryError::InvalidMetric(_)
                | GeometryError::NonFinite
        )
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
