//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    /// Smallest norm still treated as a live state. 1e-300 for `f64`, the
    /// smallest normal value for types that cannot represent it.
    #[inline]
    fn collapse_floor() -> Self {
        let floor = Self::lit(1e-300);
        if floor > Self::zero() {
            floor
        } else {
            Self::min_positive_value()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_floor_is_positive_for_both_widths() {
        assert_eq!(f64::collapse_floor(), 1e-300);
        assert!(f32::collapse_floor() > 0.0);
        assert_eq!(f32::collapse_floor(), f32::MIN_POSITIVE);
    }
}
