//! Scalar abstraction: the library is generic over the real floating-point
//! type carrying the complex arithmetic (`f32` or `f64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar underlying all complex arithmetic.
///
/// Implemented by `f32` and `f64` through the blanket impl below.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the scalar type in use.
///
/// Every constant in this crate is exactly representable (or harmlessly
/// rounded) in `f32`, so the conversion cannot fail for supported scalars.
#[inline]
pub fn real<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 constant representable in scalar type")
}

/// Converts a scalar back to `f64` (used for error payloads and JSON output).
#[inline]
pub fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().expect("scalar convertible to f64")
}
