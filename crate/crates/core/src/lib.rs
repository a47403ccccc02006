//! Numerical kernels for the Finsleroid space: the metric function and its tensor stack,
//! the quasi-euclidean map, closed-form geodesics, the two-vector angle and scalar product,
//! the parallelogram sum and difference, and their pullback to the original coordinates.

pub mod cli;
pub mod dense;
pub mod error;
pub mod finslerops;
pub mod geodesics;
pub mod numdiff;
pub mod quasimap;
pub mod scalars;
pub mod space;
pub mod tensors;
pub mod twovector;
pub mod verify;

pub use error::{GeometryError, Result};
pub use space::{FinslerVector, GParameter, MetricContext, QuasiVector};
