//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar the estimators are generic over.
///
/// Implemented for `f32` and `f64`. Return arithmetic needs `ln`, `exp` and
/// `sqrt`, so exact rational types are not supported.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest reciprocal condition number accepted before a linear system
    /// is declared singular.
    #[inline]
    fn rcond_floor() -> Self {
        Self::lit(1e-12).max(Self::epsilon())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Arithmetic mean of a nonempty slice.
pub(crate) fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::from_count(xs.len())
}

/// Sum of squares.
pub(crate) fn sum_sq<T: Scalar>(xs: &[T]) -> T {
    xs.iter().map(|&x| x * x).sum()
}
