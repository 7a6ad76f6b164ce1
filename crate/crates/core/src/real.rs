//! Scalar abstraction over the working precision of the codec.
//!
//! Every transform in the codec is written once against [`Real`] and
//! instantiated for `f32` or `f64` according to the active
//! [`PrecisionPolicy`](crate::PrecisionPolicy).

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// A binary floating-point type usable as an intermediate precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Significand width including the implicit leading bit (24 or 53).
    const MANTISSA_DIGITS: u32;

    fn of_f64(x: f64) -> Self;
    fn of_f32(x: f32) -> Self;
    fn as_f64(self) -> f64;
    fn as_f32(self) -> f32;
}

impl Real for f32 {
    const MANTISSA_DIGITS: u32 = f32::MANTISSA_DIGITS;

    #[inline(always)]
    fn of_f64(x: f64) -> Self {
        x as f32
    }
    #[inline(always)]
    fn of_f32(x: f32) -> Self {
        x
    }
    #[inline(always)]
    fn as_f64(self) -> f64 {
        self as f64
    }
    #[inline(always)]
    fn as_f32(self) -> f32 {
        self
    }
}

impl Real for f64 {
    const MANTISSA_DIGITS: u32 = f64::MANTISSA_DIGITS;

    #[inline(always)]
    fn of_f64(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn of_f32(x: f32) -> Self {
        x as f64
    }
    #[inline(always)]
    fn as_f64(self) -> f64 {
        self
    }
    #[inline(always)]
    fn as_f32(self) -> f32 {
        self as f32
    }
}

/// Nearest integer with ties rounded toward +∞, computed as `ceil(floor(2x) / 2)`.
///
/// Every step is exact in binary floating point, so the result does not
/// depend on the precision `T` beyond the representation of `x` itself.
#[inline(always)]
pub fn nint<T: Real>(x: T) -> i64 {
    let two = T::one() + T::one();
    ((x * two).floor() / two)
        .ceil()
        .to_i64()
        .unwrap_or(if x > T::zero() { i64::MAX } else { i64::MIN })
}
