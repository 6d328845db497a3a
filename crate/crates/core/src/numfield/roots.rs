//! Simultaneous (Aberth–Ehrlich) root finding with Newton polishing and
//! multiplicity detection by clustering.

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::{creal, Cx, Scalar};

/// Tuning knobs for [`roots_with`].
#[derive(Clone, Copy, Debug)]
pub struct RootOptions<T: Scalar> {
    /// Residual bound: `|p(r)| <= tol * scale(p, r)`.
    pub tol: T,
    /// Roots closer than this are merged; `None` means `1e-6 * (1 + max|root|)`.
    pub cluster_radius: Option<T>,
    pub max_iter: usize,
}

impl<T: Scalar> Default for RootOptions<T> {
    fn default() -> Self {
        RootOptions {
            tol: T::lit(1e-9).max(T::epsilon() * T::lit(64.0)),
            cluster_radius: None,
            max_iter: 800,
        }
    }
}

/// Roots of `p` with multiplicities, using default options.
pub fn roots<T: Scalar>(p: &Polynomial<T>) -> Result<Vec<(Cx<T>, usize)>> {
    roots_with(p, &RootOptions::default())
}

pub fn roots_with<T: Scalar>(p: &Polynomial<T>, opts: &RootOptions<T>) -> Result<Vec<(Cx<T>, usize)>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    let zero = creal(T::zero());
    // exact zero roots
    let lowest = p.coeffs().iter().position(|c| c.norm_sqr() != T::zero()).unwrap_or(0);
    let reduced = Polynomial::new(p.coeffs()[lowest..].to_vec());
    let mut approx = aberth(&reduced, opts.max_iter)?;
    for z in approx.iter_mut() {
        *z = newton_polish(&reduced, *z, 4);
    }
    let mut simple: Vec<Cx<T>> = approx;
    simple.extend(std::iter::repeat_n(zero, lowest));

    let max_abs = simple.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let radius = opts
        .cluster_radius
        .unwrap_or_else(|| T::lit(1e-6) * (T::one() + max_abs));
    let clusters = cluster_roots(p, &simple, radius);

    let mut out = Vec::with_capacity(clusters.len());
    for members in clusters {
        let k = members.len();
        let centroid = members.iter().fold(zero, |acc, &z| acc + z) / T::from_usize_lossy(k);
        let root = if k == 1 {
            members[0]
        } else if members.iter().all(|z| z.norm_sqr() == T::zero()) {
            zero
        } else {
            refine_multiple(p, centroid, k)
        };
        let resid = p.eval(root).norm();
        let scale = p.abs_scale(root);
        if resid > opts.tol * scale.max(T::min_positive_value()) {
            return Err(Error::NonConvergence(format!(
                "residual {} at root {} exceeds tolerance",
                resid, root
            )));
        }
        out.push((root, k));
    }
    out.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.im.partial_cmp(&b.0.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

fn aberth<T: Scalar>(p: &Polynomial<T>, max_iter: usize) -> Result<Vec<Cx<T>>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p.leading();
    let monic = p.scale(lead.inv());
    if n == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }
    // Fujiwara-type radius for the initial circle
    let mut radius = T::zero();
    for i in 0..n {
        let c = monic.coeff(i).norm();
        if c > T::zero() {
            let e = T::one() / T::from_usize_lossy(n - i);
            radius = radius.max(c.powf(e));
        }
    }
    if radius == T::zero() {
        radius = T::one();
    }
    let two_pi = T::PI() + T::PI();
    let mut z: Vec<Cx<T>> = (0..n)
        .map(|k| {
            let ang = two_pi * T::from_usize_lossy(k) / T::from_usize_lossy(n) + T::lit(0.4);
            Cx::from_polar(radius, ang)
        })
        .collect();
    let eps = T::epsilon();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (pv, dpv) = monic.eval_with_derivative(z[i]);
            if pv.norm_sqr() == T::zero() {
                done[i] = true;
                continue;
            }
            let ratio = pv / dpv;
            let mut sum = creal(T::zero());
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm_sqr() > T::zero() {
                        sum += d.inv();
                    }
                }
            }
            let denom = creal(T::one()) - ratio * sum;
            let delta = if denom.norm_sqr() > T::zero() && dpv.norm_sqr() > T::zero() {
                ratio / denom
            } else {
                // perturb off a stationary point
                Cx::from_polar(radius * T::lit(1e-3), T::from_usize_lossy(i))
            };
            if !(delta.re.is_finite() && delta.im.is_finite()) {
                return Err(Error::NonConvergence("Aberth iteration produced non-finite step".into()));
            }
            z[i] -= delta;
            if delta.norm() <= T::lit(4.0) * eps * (z[i].norm() + eps) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    // Linear convergence at multiple roots can exhaust the budget; accept when the
    // residuals are nevertheless small, otherwise report failure.
    let ok = z.iter().all(|&r| {
        monic.eval(r).norm() <= T::lit(1e-6).max(eps.sqrt()) * monic.abs_scale(r)
    });
    if ok {
        Ok(z)
    } else {
        Err(Error::NonConvergence(format!(
            "Aberth iteration exceeded {} iterations",
            max_iter
        )))
    }
}

fn newton_polish<T: Scalar>(p: &Polynomial<T>, mut z: Cx<T>, steps: usize) -> Cx<T> {
    let mut best = p.eval(z).norm();
    for _ in 0..steps {
        let (pv, dpv) = p.eval_with_derivative(z);
        if dpv.norm_sqr() == T::zero() || pv.norm_sqr() == T::zero() {
            break;
        }
        let cand = z - pv / dpv;
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

/// Group approximate roots into multiplicity clusters.
///
/// Two clusters merge when their members lie within `radius`, or when the merged
/// group is consistent with a single multiple root under rounding perturbation:
/// every member lies within `10 (64 eps S(c) / |a_k(c)|)^(1/k)` of the centroid `c`,
/// where `a_k` is the k-th Taylor coefficient and `S` the absolute coefficient scale.
fn cluster_roots<T: Scalar>(p: &Polynomial<T>, pts: &[Cx<T>], radius: T) -> Vec<Vec<Cx<T>>> {
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (pts[i] - pts[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<Cx<T>>> = {
        let mut map: std::collections::BTreeMap<usize, Vec<Cx<T>>> = Default::default();
        for (i, &z) in pts.iter().enumerate() {
            let r = find(&mut parent, i);
            map.entry(r).or_default().push(z);
        }
        map.into_values().collect()
    };

    let zero = creal(T::zero());
    let centroid = |g: &[Cx<T>]| g.iter().fold(zero, |a, &z| a + z) / T::from_usize_lossy(g.len());
    let eps = T::epsilon();
    loop {
        // candidate pairs by centroid distance
        let mut pairs: Vec<(T, usize, usize)> = Vec::new();
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let d = (centroid(&groups[i]) - centroid(&groups[j])).norm();
                pairs.push((d, i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut merged = None;
        for &(_, i, j) in &pairs {
            let mut cand = groups[i].clone();
            cand.extend_from_slice(&groups[j]);
            let k = cand.len();
            let c = centroid(&cand);
            let taylor = p.taylor_at(c);
            let ak = taylor.get(k).map(|t| t.norm()).unwrap_or_else(T::zero);
            if ak == T::zero() {
                continue;
            }
            let s = p.abs_scale(c);
            let bound = T::lit(10.0)
                * (T::lit(64.0) * eps * s / ak).powf(T::one() / T::from_usize_lossy(k));
            if cand.iter().all(|z| (*z - c).norm() <= bound) {
                merged = Some((i, j, cand));
                break;
            }
        }
        match merged {
            Some((i, j, cand)) => {
                groups[i] = cand;
                groups.remove(j);
            }
            None => break,
        }
    }
    groups
}

/// Polish the centre of a k-fold cluster by Newton on the (k-1)-th derivative.
fn refine_multiple<T: Scalar>(p: &Polynomial<T>, c: Cx<T>, k: usize) -> Cx<T> {
    let mut d = p.clone();
    for _ in 0..(k - 1) {
        d = d.derivative();
    }
    let mut z = c;
    let mut last_step = T::infinity();
    for _ in 0..12 {
        let (v, dv) = d.eval_with_derivative(z);
        if dv.norm_sqr() == T::zero() || v.norm_sqr() == T::zero() {
            break;
        }
        let step = v / dv;
        let len = step.norm();
        if !(len < last_step) {
            break;
        }
        z -= step;
        last_step = len;
        if len <= T::lit(4.0) * T::epsilon() * (z.norm() + T::one()) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Polynomial<f64>;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn simple_pair() {
        let r = roots(&P::from_real(&[-1., 0., 1.])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].0 - c(-1., 0.)).norm() < 1e-12 && r[0].1 == 1);
        assert!((r[1].0 - c(1., 0.)).norm() < 1e-12 && r[1].1 == 1);
    }

    #[test]
    fn triple_root_is_quantized() {
        let p = P::from_roots(&[(c(2., 0.), 3)]);
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, 3);
        assert!((r[0].0 - c(2., 0.)).norm() < 1e-8);
    }

    #[test]
    fn mixed_multiplicities() {
        let p = P::from_roots(&[(c(0.5, -1.0), 2), (c(-1.0, 0.25), 1), (c(3.0, 0.0), 4)]);
        let mut r = roots(&p).unwrap();
        r.sort_by_key(|x| x.1);
        assert_eq!(r.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!((r[2].0 - c(3.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn monomial_roots_at_zero() {
        let r = roots(&P::from_real(&[0., 0., 0., 0., 5.])).unwrap();
        assert_eq!(r, vec![(c(0., 0.), 4)]);
    }

    #[test]
    fn close_simple_roots_stay_separate() {
        let p = P::from_real(&[-1e-8, 0., 1.]);
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(roots(&P::zero()).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let p = Polynomial::<f32>::from_real(&[-6., 11., -6., 1.]);
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[2].0.re - 3.0).abs() < 1e-3);
    }
}
