use super::poly::{wronskian, Polynomial};
use super::roots::roots;
use super::sphere::SpherePoint;
use crate::error::{Error, Result};
use crate::scalar::{creal, Cx, Scalar};

/// A rational map of the Riemann sphere `num / den` with coprime numerator and
/// denominator and degree `max(deg num, deg den) >= 2`.
#[derive(Clone, Debug)]
pub struct RationalFunction<T: Scalar> {
    num: Polynomial<T>,
    den: Polynomial<T>,
    degree: usize,
    chart_radius: T,
}

impl<T: Scalar> RationalFunction<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateFunction("denominator is identically zero".into()));
        }
        if num.is_zero() {
            return Err(Error::DegenerateFunction("numerator is identically zero".into()));
        }
        let degree = num.degree().max(den.degree());
        if degree < 2 {
            return Err(Error::DegenerateFunction(format!("degree {} < 2", degree)));
        }
        let zs = if num.degree() > 0 { roots(&num)? } else { Vec::new() };
        let ps = if den.degree() > 0 { roots(&den)? } else { Vec::new() };
        let max_abs = zs
            .iter()
            .chain(ps.iter())
            .fold(T::zero(), |m, (r, _)| m.max(r.norm()));
        let radius = T::lit(1e-6) * (T::one() + max_abs);
        for (a, _) in &zs {
            for (b, _) in &ps {
                if (*a - *b).norm() <= radius {
                    return Err(Error::NotCoprime(format!("{}", a)));
                }
            }
        }
        Ok(RationalFunction {
            num,
            den,
            degree,
            chart_radius: T::lit(2.0) * (T::one() + max_abs),
        })
    }

    /// A polynomial map.
    pub fn polynomial(p: Polynomial<T>) -> Result<Self> {
        Self::new(p, Polynomial::constant(creal(T::one())))
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Radius beyond which evaluation switches to the chart at infinity.
    pub fn chart_radius(&self) -> T {
        self.chart_radius
    }

    /// `z^n num(1/z)` with `n` the degree of the map.
    pub fn num_reversed(&self) -> Polynomial<T> {
        self.num.reversed(self.degree)
    }

    pub fn den_reversed(&self) -> Polynomial<T> {
        self.den.reversed(self.degree)
    }

    /// `num' den - num den'`: its roots are the finite critical points, with
    /// ramification one more than the root multiplicity.
    pub fn critical_numerator(&self) -> Polynomial<T> {
        wronskian(&self.num, &self.den).trimmed(T::lit(1e-13))
    }

    /// Value at infinity, read from the leading coefficients.
    pub fn value_at_infinity(&self) -> SpherePoint<T> {
        let (dn, dd) = (self.num.degree(), self.den.degree());
        if dn > dd {
            SpherePoint::Infinity
        } else if dn < dd {
            SpherePoint::Finite(creal(T::zero()))
        } else {
            SpherePoint::Finite(self.num.leading() / self.den.leading())
        }
    }

    pub fn eval(&self, z: SpherePoint<T>) -> SpherePoint<T> {
        match z {
            SpherePoint::Infinity => self.value_at_infinity(),
            SpherePoint::Finite(w) => {
                if w.norm() <= self.chart_radius {
                    self.eval_finite_chart(w)
                } else {
                    self.eval_infinity_chart(w)
                }
            }
        }
    }

    pub fn eval_c(&self, z: Cx<T>) -> SpherePoint<T> {
        self.eval(SpherePoint::Finite(z))
    }

    /// Direct evaluation `num(z) / den(z)`.
    pub fn eval_finite_chart(&self, z: Cx<T>) -> SpherePoint<T> {
        let d = self.den.eval(z);
        let n = self.num.eval(z);
        if d.norm_sqr() == T::zero() {
            return SpherePoint::Infinity;
        }
        SpherePoint::from(n / d)
    }

    /// Evaluation through `u = 1/z`: `z^(dn - dd) N(u) / D(u)` with reversed
    /// numerator and denominator.
    pub fn eval_infinity_chart(&self, z: Cx<T>) -> SpherePoint<T> {
        if z.norm_sqr() == T::zero() {
            return self.eval_finite_chart(z);
        }
        let u = z.inv();
        let (dn, dd) = (self.num.degree(), self.den.degree());
        let nu = self.num.reversed(dn).eval(u);
        let du = self.den.reversed(dd).eval(u);
        if du.norm_sqr() == T::zero() {
            return SpherePoint::Infinity;
        }
        let ratio = nu / du;
        let value = if dn >= dd {
            ratio * z.powu((dn - dd) as u32)
        } else {
            ratio * u.powu((dd - dn) as u32)
        };
        SpherePoint::from(value)
    }

    /// Homogeneous residual `beta num(z) - alpha den(z)` in the finite chart.
    pub(crate) fn homogeneous(&self, alpha: Cx<T>, beta: Cx<T>) -> Polynomial<T> {
        &self.num.scale(beta) - &self.den.scale(alpha)
    }

    pub fn to_f64(&self) -> RationalFunction<f64> {
        RationalFunction {
            num: self.num.to_f64(),
            den: self.den.to_f64(),
            degree: self.degree,
            chart_radius: self.chart_radius.as_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type R = RationalFunction<f64>;
    type P = Polynomial<f64>;

    fn example() -> R {
        // z(z^2-1)(z^2-4)/(z-3)
        R::new(P::from_real(&[0., 4., 0., -5., 0., 1.]), P::from_real(&[-3., 1.])).unwrap()
    }

    #[test]
    fn eval_examples() {
        let sq = R::polynomial(P::from_real(&[0., 0., 1.])).unwrap();
        assert_eq!(sq.eval(SpherePoint::real(3.0)), SpherePoint::real(9.0));
        let inv = R::new(P::from_real(&[0., 0., 1.]), P::from_real(&[0., 0., 0., 1.]));
        // z^2/z^3 is not coprime
        assert!(matches!(inv, Err(Error::NotCoprime(_))));
        let recip2 = R::new(P::from_real(&[1.]), P::from_real(&[0., 0., 1.])).unwrap();
        assert!(recip2.eval(SpherePoint::real(0.0)).is_infinite());
        assert!(example().eval(SpherePoint::Infinity).is_infinite());
    }

    #[test]
    fn degree_one_is_degenerate() {
        let r = R::new(P::from_real(&[1., 1.]), P::from_real(&[1.]));
        assert!(matches!(r, Err(Error::DegenerateFunction(_))));
    }

    #[test]
    fn charts_agree_near_switch_radius() {
        let f = example();
        let rad = f.chart_radius();
        for k in 0..16 {
            let z = Cx::from_polar(rad * 1.001, k as f64 * 0.39 + 0.1);
            let a = f.eval_finite_chart(z).as_finite().unwrap();
            let b = f.eval_infinity_chart(z).as_finite().unwrap();
            assert!((a - b).norm() <= 1e-10 * a.norm());
        }
    }
}
