//! Scalar abstraction for the numerical kernels.
//!
//! Closed-form evaluations (norms, kernels, bumps, special functions,
//! oscillatory phases) are generic over [`Real`] so they can be
//! instantiated at `f32` or `f64`. The Monte Carlo machinery, FFT grids,
//! and everything feeding the reproducibility contract are pinned to
//! `f64` via the [`crate::Scalar`] alias.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable by the generic kernels.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal; panics only on non-representable input,
    /// which cannot happen for the finite constants used internally.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_hypot<T: Real>(a: T, b: T) -> T {
        (a * a + b * b).sqrt()
    }

    #[test]
    fn instantiates_at_both_widths() {
        assert_eq!(generic_hypot(3.0f64, 4.0f64), 5.0);
        assert_eq!(generic_hypot(3.0f32, 4.0f32), 5.0);
        assert_eq!(f64::of(0.25), 0.25);
    }
}
