//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign, NumCast};

/// Real floating-point type the core math is written against (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + NumAssign + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    fn lit(value: f64) -> Self {
        <Self as NumCast>::from(value).expect("f64 constant representable")
    }

    /// A tolerance of `base`, floored at a small multiple of machine epsilon so
    /// that f64 tolerances stay meaningful in lower precision.
    fn tol(base: f64) -> Self {
        Self::lit(base).max(Self::epsilon() * Self::lit(16.0))
    }

    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
