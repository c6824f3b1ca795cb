//! Moments of the Hermitian matrix Jacobi process.
//!
//! The core is generic over [`Scalar`]: `f32`, `f64`, and exact
//! [`Rational`] numbers. Integer parameters on the rational path give exact
//! moment expansions; only the time-dependent exponentials are floating.

pub mod asymptotics;
pub mod density;
pub mod error;
pub mod jacobi1d;
pub mod linalg;
pub mod moments;
pub mod oracle;
pub mod partitions;
pub mod scalar;
pub mod simulate;
pub mod symjacobi;

pub use error::{Error, Result};
pub use partitions::Partition;
pub use scalar::Scalar;
pub use symjacobi::JacobiParams;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Parameters on the exact path.
pub type ExactParams = JacobiParams<Rational>;
/// Parameters on the double-precision path.
pub type FloatParams = JacobiParams<f64>;
