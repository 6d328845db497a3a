//! Complex polynomials and rational maps of the Riemann sphere.

mod poly;
mod rational;
mod roots;
mod sphere;

pub use poly::{wronskian, Polynomial};
pub use rational::RationalFunction;
pub use roots::{roots, roots_with, RootOptions};
pub use sphere::SpherePoint;
