//! Critical points, critical values, fibers and cocritical points of a rational map.

use crate::error::{Error, Result};
use crate::numfield::{roots, Polynomial, RationalFunction, SpherePoint};
use crate::scalar::{creal, Cx, Scalar};

#[derive(Clone, Debug)]
pub struct CriticalPoint<T: Scalar> {
    pub point: SpherePoint<T>,
    /// Local degree `mu >= 2`.
    pub ramification: usize,
    /// Index into [`CriticalData::critical_values`].
    pub value_index: usize,
}

#[derive(Clone, Debug)]
pub struct CriticalData<T: Scalar> {
    pub degree: usize,
    pub critical_points: Vec<CriticalPoint<T>>,
    /// Distinct critical values; finite values sorted by `(re, im)`, infinity last.
    pub critical_values: Vec<SpherePoint<T>>,
    pub genus: usize,
}

impl<T: Scalar> CriticalData<T> {
    /// Number of critical points `m`.
    pub fn m(&self) -> usize {
        self.critical_points.len()
    }

    /// Number of distinct critical values `q`.
    pub fn q(&self) -> usize {
        self.critical_values.len()
    }

    pub fn ramification_sum(&self) -> usize {
        self.critical_points.iter().map(|c| c.ramification - 1).sum()
    }

    /// Critical points lying over the critical value with index `j`.
    pub fn points_over(&self, j: usize) -> impl Iterator<Item = &CriticalPoint<T>> {
        self.critical_points.iter().filter(move |c| c.value_index == j)
    }
}

/// Solutions of `f(z) = w` with local multiplicities.
#[derive(Clone, Debug)]
pub struct Fiber<T: Scalar> {
    pub target: SpherePoint<T>,
    pub points: Vec<(SpherePoint<T>, usize)>,
}

impl<T: Scalar> Fiber<T> {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.1).sum()
    }
}

/// A regular preimage of a critical value.
#[derive(Clone, Debug)]
pub struct Cocritical<T: Scalar> {
    pub point: SpherePoint<T>,
    pub value_index: usize,
}

/// Local degree of `f` at infinity.
pub fn local_degree_at_infinity<T: Scalar>(f: &RationalFunction<T>) -> usize {
    let (num, den) = (f.num(), f.den());
    let (dn, dd) = (num.degree(), den.degree());
    if dn != dd {
        return dn.abs_diff(dd);
    }
    // f - f(inf) = (num b - den a) / (den b) with a, b the leading coefficients
    let diff = &num.scale(den.leading()) - &den.scale(num.leading());
    let diff = diff.truncated_to_degree(dn.saturating_sub(1)).trimmed(T::lit(1e-13));
    let scale = num.max_abs_coeff() * den.max_abs_coeff();
    if diff.is_zero() || diff.max_abs_coeff() <= T::lit(1e-13) * scale {
        return f.degree();
    }
    dn - diff.degree()
}

fn value_radius<T: Scalar>(values: &[SpherePoint<T>]) -> T {
    let max = values.iter().fold(T::zero(), |m, v| m.max(v.finite_norm()));
    T::lit(1e-6) * (T::one() + max)
}

/// Critical points (roots of the Wronskian `num' den - num den'`, plus infinity when
/// its local degree exceeds one) and their clustered images.
pub fn critical_data<T: Scalar>(f: &RationalFunction<T>) -> Result<CriticalData<T>> {
    let n = f.degree();
    if n < 2 {
        return Err(Error::DegenerateFunction(format!("degree {} < 2", n)));
    }
    let w = f.critical_numerator();
    let finite = if w.degree() > 0 { roots(&w)? } else { Vec::new() };
    let poles = if f.den().degree() > 0 { roots(f.den())? } else { Vec::new() };
    let max_abs = finite
        .iter()
        .chain(poles.iter())
        .fold(T::zero(), |m, (r, _)| m.max(r.norm()));
    let pole_radius = T::lit(1e-6) * (T::one() + max_abs);

    let mut pts: Vec<(SpherePoint<T>, usize)> = Vec::new();
    let mut images: Vec<SpherePoint<T>> = Vec::new();
    for &(c, k) in &finite {
        pts.push((SpherePoint::Finite(c), k + 1));
        let at_pole = poles.iter().any(|(p, _)| (*p - c).norm() <= pole_radius);
        images.push(if at_pole { SpherePoint::Infinity } else { f.eval_c(c) });
    }
    let mu_inf = local_degree_at_infinity(f);
    if mu_inf >= 2 {
        pts.push((SpherePoint::Infinity, mu_inf));
        images.push(f.value_at_infinity());
    }
    let sum: usize = pts.iter().map(|p| p.1 - 1).sum();
    if sum != 2 * n - 2 {
        return Err(Error::InconsistentRamification(format!(
            "sum of (mu - 1) is {}, expected {}",
            sum,
            2 * n - 2
        )));
    }

    // cluster the images into distinct critical values
    let radius = value_radius(&images);
    let mut values: Vec<(SpherePoint<T>, Vec<usize>)> = Vec::new();
    for (i, img) in images.iter().enumerate() {
        match values.iter_mut().find(|(v, _)| v.close_to(img, radius)) {
            Some((_, members)) => members.push(i),
            None => values.push((*img, vec![i])),
        }
    }
    let mut values: Vec<(SpherePoint<T>, Vec<usize>)> = values
        .into_iter()
        .map(|(v, members)| {
            let rep = match v {
                SpherePoint::Infinity => v,
                SpherePoint::Finite(_) => {
                    let s = members
                        .iter()
                        .fold(creal(T::zero()), |acc, &i| acc + images[i].as_finite().unwrap());
                    SpherePoint::Finite(s / T::from_usize_lossy(members.len()))
                }
            };
            (rep, members)
        })
        .collect();
    values.sort_by(|a, b| sphere_order(&a.0, &b.0));

    let mut value_index = vec![0; pts.len()];
    for (j, (_, members)) in values.iter().enumerate() {
        for &i in members {
            value_index[i] = j;
        }
    }
    let critical_points = pts
        .into_iter()
        .zip(value_index)
        .map(|((point, ramification), value_index)| CriticalPoint {
            point,
            ramification,
            value_index,
        })
        .collect();
    Ok(CriticalData {
        degree: n,
        critical_points,
        critical_values: values.into_iter().map(|v| v.0).collect(),
        genus: 0,
    })
}

/// Total order on sphere points: finite by `(re, im)`, infinity last.
pub(crate) fn sphere_order<T: Scalar>(a: &SpherePoint<T>, b: &SpherePoint<T>) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => Ordering::Equal,
        (SpherePoint::Infinity, _) => Ordering::Greater,
        (_, SpherePoint::Infinity) => Ordering::Less,
        (SpherePoint::Finite(x), SpherePoint::Finite(y)) => x
            .re
            .partial_cmp(&y.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal)),
    }
}

/// The polynomial whose roots are the finite points of the fiber over `w`, and
/// the multiplicity of infinity in that fiber.
pub(crate) fn fiber_polynomial<T: Scalar>(f: &RationalFunction<T>, w: &SpherePoint<T>) -> (Polynomial<T>, usize) {
    let (dn, dd) = (f.num().degree(), f.den().degree());
    match *w {
        SpherePoint::Infinity => (f.den().clone(), dn.saturating_sub(dd)),
        SpherePoint::Finite(c) => {
            let p = f.homogeneous(c, creal(T::one()));
            let at_inf = f.value_at_infinity();
            let radius = T::lit(1e-6) * (T::one() + c.norm());
            if at_inf.close_to(w, radius) {
                let d = local_degree_at_infinity(f);
                (p.truncated_to_degree(f.degree() - d), d)
            } else {
                (p, 0)
            }
        }
    }
}

/// All solutions of `f(z) = w` with multiplicity.
pub fn fiber<T: Scalar>(f: &RationalFunction<T>, w: SpherePoint<T>) -> Result<Fiber<T>> {
    let (p, inf_mult) = fiber_polynomial(f, &w);
    let mut points: Vec<(SpherePoint<T>, usize)> = if p.degree() > 0 {
        roots(&p)?.into_iter().map(|(r, k)| (SpherePoint::Finite(r), k)).collect()
    } else {
        Vec::new()
    };
    if inf_mult > 0 {
        points.push((SpherePoint::Infinity, inf_mult));
    }
    let fib = Fiber { target: w, points };
    check_fiber_sum(f, &fib)?;
    Ok(fib)
}

fn check_fiber_sum<T: Scalar>(f: &RationalFunction<T>, fib: &Fiber<T>) -> Result<()> {
    if fib.total_multiplicity() != f.degree() {
        return Err(Error::InconsistentRamification(format!(
            "fiber over {} has total multiplicity {}, expected {}",
            fib.target,
            fib.total_multiplicity(),
            f.degree()
        )));
    }
    Ok(())
}

/// Fiber over the critical value with index `j`, built by deflating the known
/// critical points out of the fiber polynomial so the remaining roots are simple.
pub fn critical_fiber<T: Scalar>(f: &RationalFunction<T>, cd: &CriticalData<T>, j: usize) -> Result<Fiber<T>> {
    let w = cd.critical_values[j];
    let (p, inf_mult) = fiber_polynomial(f, &w);
    let mut points: Vec<(SpherePoint<T>, usize)> = Vec::new();
    let mut q = p.clone();
    for c in cd.points_over(j) {
        match c.point {
            SpherePoint::Infinity => {
                if inf_mult != c.ramification {
                    return Err(Error::InconsistentRamification(format!(
                        "infinity has local degree {} in the fiber but ramification {}",
                        inf_mult, c.ramification
                    )));
                }
            }
            SpherePoint::Finite(z) => {
                for _ in 0..c.ramification {
                    q = q.deflate(z);
                }
            }
        }
        points.push((c.point, c.ramification));
    }
    let crit_radius = T::lit(1e-6) * (T::one() + cd.critical_points.iter().fold(T::zero(), |m, c| m.max(c.point.finite_norm())));
    if q.degree() > 0 {
        for (r, k) in roots(&q)? {
            if k != 1 {
                return Err(Error::InconsistentRamification(format!(
                    "unexpected multiple point {} over {}",
                    r, w
                )));
            }
            let r = polish(&p, r);
            if points.iter().any(|(s, _)| s.close_to(&SpherePoint::Finite(r), crit_radius)) {
                return Err(Error::InconsistentRamification(format!(
                    "regular preimage {} coincides with a critical point",
                    r
                )));
            }
            points.push((SpherePoint::Finite(r), 1));
        }
    }
    if inf_mult == 1 {
        points.push((SpherePoint::Infinity, 1));
    }
    let fib = Fiber { target: w, points };
    check_fiber_sum(f, &fib)?;
    Ok(fib)
}

fn polish<T: Scalar>(p: &Polynomial<T>, mut z: Cx<T>) -> Cx<T> {
    let mut best = p.eval(z).norm();
    for _ in 0..4 {
        let (v, d) = p.eval_with_derivative(z);
        if d.norm_sqr() == T::zero() {
            break;
        }
        let cand = z - v / d;
        let r = p.eval(cand).norm();
        if r < best {
            best = r;
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Simple, non-critical points of the fibers over the critical values.
pub fn cocritical_points<T: Scalar>(f: &RationalFunction<T>, cd: &CriticalData<T>) -> Result<Vec<Cocritical<T>>> {
    let mut out = Vec::new();
    for j in 0..cd.q() {
        let fib = critical_fiber(f, cd, j)?;
        for (point, k) in fib.points {
            if k == 1 {
                out.push(Cocritical { point, value_index: j });
            }
        }
    }
    Ok(out)
}

/// Genus `g` with `2g - 2 = -2n + sum(mu - 1)`.
pub fn riemann_hurwitz_genus(n: usize, mults: &[usize]) -> Result<usize> {
    if let Some(&m) = mults.iter().find(|&&m| m < 2) {
        return Err(Error::InvalidInput(format!("ramification {} < 2", m)));
    }
    let s: i64 = mults.iter().map(|&m| m as i64 - 1).sum();
    let two_g = s - 2 * n as i64 + 2;
    if two_g < 0 || two_g % 2 != 0 {
        return Err(Error::InconsistentRamification(format!(
            "sum of (mu - 1) = {} gives 2g = {}",
            s, two_g
        )));
    }
    Ok((two_g / 2) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    type R = RationalFunction<f64>;
    type P = Polynomial<f64>;

    fn power(n: usize) -> R {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        R::polynomial(P::from_real(&c)).unwrap()
    }

    fn example() -> R {
        R::new(P::from_real(&[0., 4., 0., -5., 0., 1.]), P::from_real(&[-3., 1.])).unwrap()
    }

    fn belyi_cubic() -> R {
        R::polynomial(P::from_real(&[0., 0., 3., -2.])).unwrap()
    }

    #[test]
    fn power_map() {
        for n in 2..7 {
            let cd = critical_data(&power(n)).unwrap();
            assert_eq!(cd.m(), 2);
            assert_eq!(cd.q(), 2);
            assert!(cd.critical_points.iter().all(|c| c.ramification == n));
            assert_eq!(cd.critical_values[0], SpherePoint::real(0.0));
            assert!(cd.critical_values[1].is_infinite());
            assert!(cocritical_points(&power(n), &cd).unwrap().is_empty());
        }
    }

    #[test]
    fn example_degree_five() {
        let f = example();
        let cd = critical_data(&f).unwrap();
        assert_eq!(cd.m(), 6);
        assert_eq!(cd.q(), 6);
        let inf = cd.critical_points.iter().find(|c| c.point.is_infinite()).unwrap();
        assert_eq!(inf.ramification, 4);
        assert_eq!(cd.ramification_sum(), 8);
        assert!(cd.critical_values[5].is_infinite());
        let co = cocritical_points(&f, &cd).unwrap();
        assert_eq!(co.len(), 16);
        assert_eq!(cd.m() + co.len(), 5 * 6 - 2 * 5 + 2);
        let pole = co.iter().filter(|c| c.value_index == 5).collect::<Vec<_>>();
        assert_eq!(pole.len(), 1);
        assert!((pole[0].point.as_finite().unwrap() - Cx::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fiber_over_infinity() {
        let fib = fiber(&example(), SpherePoint::Infinity).unwrap();
        assert_eq!(fib.points.len(), 2);
        assert!((fib.points[0].0.as_finite().unwrap() - Cx::new(3.0, 0.0)).norm() < 1e-12);
        assert_eq!(fib.points[0].1, 1);
        assert_eq!(fib.points[1], (SpherePoint::Infinity, 4));
    }

    #[test]
    fn simple_fibers() {
        let f = power(3);
        let fib = fiber(&f, SpherePoint::real(0.0)).unwrap();
        assert_eq!(fib.points.len(), 1);
        assert_eq!(fib.points[0].1, 3);
        let fib = fiber(&power(2), SpherePoint::real(1.0)).unwrap();
        assert_eq!(fib.points.len(), 2);
        assert!((fib.points[0].0.as_finite().unwrap() + 1.0).norm() < 1e-12);
        assert!((fib.points[1].0.as_finite().unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn belyi_cubic_data() {
        let f = belyi_cubic();
        let cd = critical_data(&f).unwrap();
        assert_eq!(cd.q(), 3);
        let mut mu: Vec<usize> = cd.critical_points.iter().map(|c| c.ramification).collect();
        mu.sort();
        assert_eq!(mu, vec![2, 2, 3]);
        assert_eq!(cd.critical_values[0], SpherePoint::real(0.0));
        assert!((cd.critical_values[1].as_finite().unwrap() - 1.0).norm() < 1e-12);
        let co = cocritical_points(&f, &cd).unwrap();
        assert_eq!(co.len(), 2);
        // regular preimages: 3/2 over 0 and -1/2 over 1
        assert!((co[0].point.as_finite().unwrap() - 1.5).norm() < 1e-12);
        assert!((co[1].point.as_finite().unwrap() + 0.5).norm() < 1e-12);
    }

    #[test]
    fn equal_degree_infinity() {
        // (z^2 + z + 1) / (z^2 - 1) is unramified at infinity, (z^2 + 1) / (z^2 - 1) is not
        let f = R::new(P::from_real(&[1., 1., 1.]), P::from_real(&[-1., 0., 1.])).unwrap();
        assert_eq!(local_degree_at_infinity(&f), 1);
        let cd = critical_data(&f).unwrap();
        assert_eq!(cd.m(), 2);
        assert!(cd.critical_points.iter().all(|c| !c.point.is_infinite()));
        let even = R::new(P::from_real(&[1., 0., 1.]), P::from_real(&[-1., 0., 1.])).unwrap();
        assert_eq!(local_degree_at_infinity(&even), 2);
        // 1 + 1/z^3 written with equal degrees is ramified of order 3 there
        let g = R::new(P::from_real(&[1., 0., 0., 1.]), P::from_real(&[0., 0., 0., 1.])).unwrap();
        assert_eq!(local_degree_at_infinity(&g), 3);
        let cd = critical_data(&g).unwrap();
        assert_eq!(cd.q(), 2);
    }

    #[test]
    fn rh_genus() {
        assert_eq!(riemann_hurwitz_genus(5, &[2, 2, 2, 2, 2, 4]).unwrap(), 0);
        assert_eq!(riemann_hurwitz_genus(2, &[2, 2, 2, 2]).unwrap(), 1);
        assert_eq!(riemann_hurwitz_genus(2, &[2, 2]).unwrap(), 0);
        assert!(matches!(
            riemann_hurwitz_genus(3, &[2, 2, 2]),
            Err(Error::InconsistentRamification(_))
        ));
        assert!(matches!(riemann_hurwitz_genus(3, &[2]), Err(Error::InconsistentRamification(_))));
    }
}
