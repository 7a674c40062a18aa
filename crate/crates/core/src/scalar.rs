//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating-point type the solvers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// written as `f64` literals and converted with [`Scalar::of`].
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    fn of(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 constant representable")
    }

    /// Lossy conversion used for reports.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
