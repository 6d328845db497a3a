//! Tessellations of the Riemann sphere pulled back by rational maps, the combinatorial
//! maps they induce, consistent labellings, and realization of maps as branched coverings.
//!
//! Numeric types are generic over [`scalar::Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`.

pub mod critical;
pub mod error;
pub mod fixtures;
pub mod gamma;
pub mod io;
pub mod labelling;
pub mod monodromy;
pub mod numfield;
pub mod perm;
pub mod render;
pub mod scalar;
pub mod surfmap;
pub mod trace;

pub use error::{Error, ErrorClass, Result};

pub type Complex = scalar::Cx<f64>;
pub type Point = numfield::SpherePoint<f64>;
pub type Poly = numfield::Polynomial<f64>;
pub type Rational = numfield::RationalFunction<f64>;
pub type Critical = critical::CriticalData<f64>;
pub type Path = gamma::JordanPath<f64>;
pub type Embedded = trace::EmbeddedRMap<f64>;
