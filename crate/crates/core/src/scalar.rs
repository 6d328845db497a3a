//! Floating-point scalar abstraction for the numeric pipeline.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the numeric modules are generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion from a count.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn creal<T: Scalar>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// Chordal distance on the Riemann sphere between two finite points.
pub(crate) fn chordal<T: Scalar>(a: Cx<T>, b: Cx<T>) -> T {
    let two = T::lit(2.0);
    two * (a - b).norm() / ((T::one() + a.norm_sqr()).sqrt() * (T::one() + b.norm_sqr()).sqrt())
}

/// Chordal distance from a finite point to infinity.
pub(crate) fn chordal_to_inf<T: Scalar>(a: Cx<T>) -> T {
    T::lit(2.0) / (T::one() + a.norm_sqr()).sqrt()
}
