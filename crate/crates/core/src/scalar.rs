use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Reduces an angle to `(-pi, pi]`. Negative zero is mapped to positive zero.
pub fn normalize_angle<T: Real>(h: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    let mut a = h;
    if a > pi || a <= -pi {
        a = a - two_pi * ((a + pi) / two_pi).floor();
        // floor may land exactly on -pi after rounding
        if a <= -pi {
            a = a + two_pi;
        }
        if a > pi {
            a = a - two_pi;
        }
    }
    a + T::zero()
}

/// `atan2` with the grayscale convention `atan2(0, 0) = 0`, normalized to `(-pi, pi]`.
pub fn atan2_or_zero<T: Real>(y: T, x: T) -> T {
    if y == T::zero() && x == T::zero() {
        return T::zero();
    }
    normalize_angle(y.atan2(x))
}
