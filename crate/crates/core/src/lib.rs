//! Bivariate Lagrange interpolation at the Padua points, with the baselines
//! and simulation harness needed to benchmark it as a field-mapping scheme for
//! arrays of projectively measured qubit sensors.
//!
//! The numerical core lives in [`chebyshev`], [`points`], [`padua`] and
//! [`lsq`]; [`rbf`] and the standard neighbourhood assignment are the
//! comparison baselines; [`field`], [`measurement`] and [`bench`] drive the
//! experiments; [`io`] and [`cli`] are the command-line surface.

pub mod bench;
pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod field;
pub mod io;
pub mod lsq;
pub mod measurement;
pub mod padua;
pub mod points;
pub mod rbf;

pub use error::{Error, Result};
pub use points::Point2;

/// A fitted reconstruction that can be evaluated at arbitrary points.
pub trait Interpolant {
    fn evaluate(&self, targets: &[Point2]) -> Result<Vec<f64>>;
}
