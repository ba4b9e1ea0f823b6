//! Scalar abstraction shared by every kernel in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::num::ParseFloatError;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + FftNum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr<Err = ParseFloatError>
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal is representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable")
    }

    #[inline]
    fn tau() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `a + (b - a) * w`
#[inline]
pub fn lerp<T: Real>(a: T, b: T, w: T) -> T {
    a + (b - a) * w
}

/// Inclusive saturation to `[0, 1]`.
#[inline]
pub fn clamp01<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}
