//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point scalar the library is generic over: `f32` or `f64`.
///
/// The associated constants carry the precision-dependent slack used when
/// validating distributions and the default solver tolerance.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Allowed `|sum(weights) - 1|` for a valid distribution.
    const SIMPLEX_SLACK: f64;
    /// Default maximum constraint residual accepted by the solver.
    const DEFAULT_TOL: f64;

    /// Converts an `f64` literal into this scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const SIMPLEX_SLACK: f64 = 1e-9;
    const DEFAULT_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const SIMPLEX_SLACK: f64 = 1e-5;
    const DEFAULT_TOL: f64 = 1e-5;
}

/// Probability mass at or below this is treated as zero.
pub const ZERO_MASS: f64 = 1e-12;

/// `x * ln(x)` with the continuity convention `0 ln 0 = 0`.
pub(crate) fn xlogx<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.ln()
    }
}
