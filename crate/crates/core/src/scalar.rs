//! Floating point abstraction shared by the geometric kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used by the geometry and objective code: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Tolerance used for angle equality and near-zero arc snapping.
    fn angle_eps() -> Self;
}

impl Scalar for f32 {
    #[inline]
    fn angle_eps() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    #[inline]
    fn angle_eps() -> Self {
        1e-9
    }
}

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle<S: Scalar>(theta: S) -> S {
    let tau = S::TAU();
    let mut a = theta % tau;
    if a < S::zero() {
        a = a + tau;
    }
    // `a + tau` can round up to exactly tau for tiny negative inputs.
    if a >= tau {
        a = a - tau;
    }
    a
}

/// Smallest signed difference `b - a` in `(-π, π]`.
#[inline]
pub fn angle_diff<S: Scalar>(a: S, b: S) -> S {
    let d = wrap_angle(b - a);
    if d > S::PI() {
        d - S::TAU()
    } else {
        d
    }
}
