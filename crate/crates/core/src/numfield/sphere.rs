use std::fmt;

use crate::scalar::{chordal, chordal_to_inf, Cx, Scalar};

/// A point of the Riemann sphere: a finite complex number or the point at infinity.
#[derive(Clone, Copy, Debug)]
pub enum SpherePoint<T: Scalar> {
    Finite(Cx<T>),
    Infinity,
}

impl<T: Scalar> SpherePoint<T> {
    pub fn finite(re: T, im: T) -> Self {
        SpherePoint::Finite(Cx::new(re, im))
    }

    pub fn real(re: T) -> Self {
        SpherePoint::Finite(Cx::new(re, T::zero()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Cx<T>> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// Image under `z -> 1/z`, the chart at infinity.
    pub fn inverted(&self) -> Self {
        match *self {
            SpherePoint::Infinity => SpherePoint::Finite(Cx::new(T::zero(), T::zero())),
            SpherePoint::Finite(z) if z.norm_sqr() == T::zero() => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(z.inv()),
        }
    }

    /// Chordal distance on the unit-diameter-2 sphere; bounded by 2.
    pub fn chordal_distance(&self, other: &Self) -> T {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
            (SpherePoint::Finite(a), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(a)) => chordal_to_inf(*a),
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => chordal(*a, *b),
        }
    }

    /// Magnitude used for scale estimates; infinity counts as zero.
    pub fn finite_norm(&self) -> T {
        self.as_finite().map(|z| z.norm()).unwrap_or_else(T::zero)
    }

    /// True when both are infinite, or both finite within `radius` (absolute, finite chart).
    pub fn close_to(&self, other: &Self, radius: T) -> bool {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => (*a - *b).norm() <= radius,
            _ => false,
        }
    }

    pub fn to_f64(&self) -> SpherePoint<f64> {
        match *self {
            SpherePoint::Finite(z) => SpherePoint::Finite(Cx::new(z.re.as_f64(), z.im.as_f64())),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }
}

impl<T: Scalar> PartialEq for SpherePoint<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl<T: Scalar> From<Cx<T>> for SpherePoint<T> {
    fn from(z: Cx<T>) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl<T: Scalar> fmt::Display for SpherePoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}
