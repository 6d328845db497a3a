//! Oriented Jordan paths through the critical values and their cyclic labelling.

use crate::critical::CriticalData;
use crate::error::{Error, Result};
use crate::numfield::SpherePoint;
use crate::scalar::{creal, Cx, Scalar};

/// One oriented piece of a Jordan path, straight in the finite chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment<T: Scalar> {
    /// `a -> b`.
    Finite { a: Cx<T>, b: Cx<T> },
    /// `a -> inf` along `a + dir s`.
    RayOut { a: Cx<T>, dir: Cx<T> },
    /// `inf -> b` along `b + dir s` with `s` decreasing to zero.
    RayIn { b: Cx<T>, dir: Cx<T> },
    /// `a -> inf -> b`: the part of the line through `a` and `b` outside `[a, b]`.
    ThroughInfinity { a: Cx<T>, b: Cx<T> },
}

/// Segment parametrization `w(theta) = base + e * lambda * tan(theta)`, carried in
/// homogeneous form `(base cos + e lambda sin, cos)` so infinity is an ordinary point.
#[derive(Clone, Copy, Debug)]
pub struct SegmentParam<T: Scalar> {
    pub base: Cx<T>,
    pub e: Cx<T>,
    pub lambda: T,
    pub theta0: T,
    pub theta1: T,
}

impl<T: Scalar> SegmentParam<T> {
    /// Homogeneous coordinates `(alpha, beta)` with `w = alpha / beta`.
    pub fn homogeneous(&self, theta: T) -> (Cx<T>, Cx<T>) {
        let (s, c) = theta.sin_cos();
        (self.base * c + self.e * (self.lambda * s), creal(c))
    }

    /// Derivative of [`Self::homogeneous`] in `theta`.
    pub fn homogeneous_derivative(&self, theta: T) -> (Cx<T>, Cx<T>) {
        let (s, c) = theta.sin_cos();
        (self.e * (self.lambda * c) - self.base * s, creal(-s))
    }

    pub fn point(&self, theta: T) -> SpherePoint<T> {
        let (a, b) = self.homogeneous(theta);
        if b.norm() <= T::epsilon() * a.norm() {
            SpherePoint::Infinity
        } else {
            SpherePoint::from(a / b)
        }
    }

    /// Point at fraction `t` of the parameter range.
    pub fn at(&self, t: T) -> SpherePoint<T> {
        self.point(self.theta0 + (self.theta1 - self.theta0) * t)
    }
}

impl<T: Scalar> Segment<T> {
    pub fn start(&self) -> SpherePoint<T> {
        match *self {
            Segment::Finite { a, .. } | Segment::RayOut { a, .. } | Segment::ThroughInfinity { a, .. } => {
                SpherePoint::Finite(a)
            }
            Segment::RayIn { .. } => SpherePoint::Infinity,
        }
    }

    pub fn end(&self) -> SpherePoint<T> {
        match *self {
            Segment::Finite { b, .. } | Segment::RayIn { b, .. } | Segment::ThroughInfinity { b, .. } => {
                SpherePoint::Finite(b)
            }
            Segment::RayOut { .. } => SpherePoint::Infinity,
        }
    }

    pub fn passes_infinity(&self) -> bool {
        matches!(self, Segment::ThroughInfinity { .. })
    }

    pub fn param(&self) -> SegmentParam<T> {
        let half_pi = T::FRAC_PI_2();
        let quarter = T::FRAC_PI_4();
        match *self {
            Segment::Finite { a, b } => {
                let d = b - a;
                SegmentParam { base: a, e: d / d.norm(), lambda: d.norm(), theta0: T::zero(), theta1: quarter }
            }
            Segment::RayOut { a, dir } => SegmentParam {
                base: a,
                e: dir / dir.norm(),
                lambda: T::one() + a.norm(),
                theta0: T::zero(),
                theta1: half_pi,
            },
            Segment::RayIn { b, dir } => SegmentParam {
                base: b,
                e: dir / dir.norm(),
                lambda: T::one() + b.norm(),
                theta0: half_pi,
                theta1: T::zero(),
            },
            Segment::ThroughInfinity { a, b } => {
                let d = a - b;
                SegmentParam {
                    base: a,
                    e: d / d.norm(),
                    lambda: d.norm(),
                    theta0: T::zero(),
                    theta1: half_pi + quarter,
                }
            }
        }
    }

    /// Straight pieces `p + d s`, `s in [0, smax]` (`None` = unbounded) covering the segment.
    fn pieces(&self) -> Vec<(Cx<T>, Cx<T>, Option<T>)> {
        match *self {
            Segment::Finite { a, b } => vec![(a, b - a, Some(T::one()))],
            Segment::RayOut { a, dir } => vec![(a, dir, None)],
            Segment::RayIn { b, dir } => vec![(b, dir, None)],
            Segment::ThroughInfinity { a, b } => vec![(a, a - b, None), (b, b - a, None)],
        }
    }
}

/// Oriented Jordan path through `q` points; vertex `k` carries label `k + 1` and
/// segment `k` runs from vertex `k` to vertex `k + 1 (mod q)`.
#[derive(Clone, Debug)]
pub struct JordanPath<T: Scalar> {
    vertices: Vec<SpherePoint<T>>,
    segments: Vec<Segment<T>>,
}

impl<T: Scalar> JordanPath<T> {
    /// Builds a path from explicit segments and checks the Jordan property.
    pub fn new(vertices: Vec<SpherePoint<T>>, segments: Vec<Segment<T>>) -> Result<Self> {
        let q = vertices.len();
        if q < 2 || segments.len() != q {
            return Err(Error::InvalidPath(format!("{} vertices and {} segments", q, segments.len())));
        }
        for (k, s) in segments.iter().enumerate() {
            if s.start() != vertices[k] || s.end() != vertices[(k + 1) % q] {
                return Err(Error::InvalidPath(format!("segment {} does not join its vertices", k)));
            }
            let bad_dir = match *s {
                Segment::RayOut { dir, .. } | Segment::RayIn { dir, .. } => dir.norm_sqr() == T::zero(),
                Segment::Finite { a, b } | Segment::ThroughInfinity { a, b } => a == b,
            };
            if bad_dir {
                return Err(Error::InvalidPath(format!("segment {} is degenerate", k)));
            }
        }
        for i in 0..q {
            for j in (i + 1)..q {
                if vertices[i] == vertices[j] {
                    return Err(Error::InvalidPath(format!("vertices {} and {} coincide", i, j)));
                }
            }
        }
        let path = JordanPath { vertices, segments };
        path.check_jordan()?;
        Ok(path)
    }

    pub fn q(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[SpherePoint<T>] {
        &self.vertices
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    /// Label (1..=q) of vertex `k`.
    pub fn label(&self, k: usize) -> usize {
        k + 1
    }

    /// Index of the vertex equal to `w` within `radius`.
    pub fn vertex_index(&self, w: &SpherePoint<T>, radius: T) -> Option<usize> {
        self.vertices.iter().position(|v| v.close_to(w, radius))
    }

    /// Index of the segment passing through infinity, if any.
    pub fn infinity_segment(&self) -> Option<usize> {
        self.segments.iter().position(|s| s.passes_infinity())
    }

    fn scale(&self) -> T {
        T::one() + self.vertices.iter().fold(T::zero(), |m, v| m.max(v.finite_norm()))
    }

    /// Pairwise intersection test in the finite chart; adjacent segments may only
    /// share their common vertex.
    pub fn check_jordan(&self) -> Result<()> {
        let q = self.q();
        let tol = T::lit(1e-10) * self.scale();
        for i in 0..q {
            for j in (i + 1)..q {
                let mut shared: Vec<Cx<T>> = Vec::new();
                for a in [self.segments[i].start(), self.segments[i].end()] {
                    for b in [self.segments[j].start(), self.segments[j].end()] {
                        if let (Some(x), Some(y)) = (a.as_finite(), b.as_finite()) {
                            if x == y {
                                shared.push(x);
                            }
                        }
                    }
                }
                for p1 in self.segments[i].pieces() {
                    for p2 in self.segments[j].pieces() {
                        if pieces_cross(p1, p2, &shared, tol) {
                            return Err(Error::NotJordan(format!("segments {} and {} intersect", i, j)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Same verdict computed on sampled polylines in the `1/w` chart; crossing chords
    /// are bisected until the crossing is confirmed or disappears.
    pub fn is_jordan_in_inverse_chart(&self, samples: usize) -> bool {
        let q = self.q();
        let params: Vec<SegmentParam<T>> = self.segments.iter().map(|s| s.param()).collect();
        let at = |i: usize, t: T| {
            let p = &params[i];
            let (a, b) = p.homogeneous(p.theta0 + (p.theta1 - p.theta0) * t);
            if a.norm_sqr() == T::zero() {
                Cx::new(T::infinity(), T::infinity())
            } else {
                b / a
            }
        };
        let tol = T::lit(1e-12);
        let chords_cross = |a0: Cx<T>, a1: Cx<T>, b0: Cx<T>, b1: Cx<T>| {
            if [a0, a1, b0, b1].iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
                return false;
            }
            pieces_cross((a0, a1 - a0, Some(T::one())), (b0, b1 - b0, Some(T::one())), &[], tol)
        };
        // (segment, t0, t1) pairs whose chords cross, refined `depth` more times
        fn confirm<T: Scalar>(
            at: &dyn Fn(usize, T) -> Cx<T>,
            cross: &dyn Fn(Cx<T>, Cx<T>, Cx<T>, Cx<T>) -> bool,
            a: (usize, T, T),
            b: (usize, T, T),
            depth: usize,
        ) -> bool {
            if !cross(at(a.0, a.1), at(a.0, a.2), at(b.0, b.1), at(b.0, b.2)) {
                return false;
            }
            if depth == 0 {
                return true;
            }
            let half = T::lit(0.5);
            let (am, bm) = ((a.1 + a.2) * half, (b.1 + b.2) * half);
            [(a.1, am), (am, a.2)].iter().any(|&(x0, x1)| {
                [(b.1, bm), (bm, b.2)]
                    .iter()
                    .any(|&(y0, y1)| confirm(at, cross, (a.0, x0, x1), (b.0, y0, y1), depth - 1))
            })
        }
        let n = samples.max(1);
        let step = |k: usize| T::from_usize_lossy(k) / T::from_usize_lossy(n);
        for i in 0..q {
            for j in (i + 1)..q {
                let adjacent_end = (i + 1) % q == j;
                let adjacent_start = (j + 1) % q == i;
                for x in 0..n {
                    for y in 0..n {
                        // skip the sub-segments touching a shared vertex
                        if (adjacent_end && x == n - 1 && y == 0) || (adjacent_start && x == 0 && y == n - 1) {
                            continue;
                        }
                        let a = (i, step(x), step(x + 1));
                        let b = (j, step(y), step(y + 1));
                        if confirm(&at, &chords_cross, a, b, 12) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Whether the straight segment `[a, b]` meets the path.
    pub fn segment_crosses(&self, a: Cx<T>, b: Cx<T>) -> bool {
        let tol = T::lit(1e-12) * self.scale();
        self.segments
            .iter()
            .flat_map(|s| s.pieces())
            .any(|p| pieces_cross((a, b - a, Some(T::one())), p, &[], tol))
    }

    /// Distance from `x` to the path, skipping the segments listed in `skip`.
    pub fn distance_to(&self, x: Cx<T>, skip: &[usize]) -> T {
        let mut best = T::infinity();
        for (k, s) in self.segments.iter().enumerate() {
            if skip.contains(&k) {
                continue;
            }
            for (p, d, m) in s.pieces() {
                let mut s = dot(x - p, d) / d.norm_sqr();
                s = s.max(T::zero());
                if let Some(m) = m {
                    s = s.min(m);
                }
                best = best.min((p + d * s - x).norm());
            }
        }
        best
    }

    /// Unit tangent leaving finite vertex `k` along segment `k`.
    pub fn outgoing_direction(&self, k: usize) -> Cx<T> {
        let d = match self.segments[k] {
            Segment::Finite { a, b } => b - a,
            Segment::RayOut { dir, .. } => dir,
            Segment::ThroughInfinity { a, b } => a - b,
            Segment::RayIn { dir, .. } => -dir,
        };
        d / d.norm()
    }

    /// Unit vector from finite vertex `k` back along the incoming segment `k - 1`.
    pub fn incoming_direction(&self, k: usize) -> Cx<T> {
        let q = self.q();
        let d = match self.segments[(k + q - 1) % q] {
            Segment::Finite { a, b } => a - b,
            Segment::RayIn { dir, .. } => dir,
            Segment::ThroughInfinity { a, b } => b - a,
            Segment::RayOut { dir, .. } => -dir,
        };
        d / d.norm()
    }

    /// Whether `x` (not on the path) lies in the blue tile, the region on the left.
    ///
    /// The path is moved off infinity by `w -> 1 / (w - c)` and the winding number
    /// of the sampled image around the image of `x` decides.
    pub fn blue_contains(&self, x: Cx<T>) -> bool {
        let scale = self.scale();
        let two_pi = T::PI() + T::PI();
        let c = (0..16)
            .map(|k| x + Cx::from_polar(scale, two_pi * T::from_usize_lossy(k) / T::lit(16.0)))
            .find(|&c| self.distance_to(c, &[]) > T::lit(0.05) * scale)
            .unwrap_or_else(|| x + Cx::new(scale * T::lit(3.0), T::zero()));
        let image = |(a, b): (Cx<T>, Cx<T>)| b / (a - c * b);
        let samples = 256;
        let mut poly = Vec::with_capacity(samples * self.q());
        for s in &self.segments {
            let p = s.param();
            for k in 0..samples {
                let t = T::from_usize_lossy(k) / T::from_usize_lossy(samples);
                poly.push(image(p.homogeneous(p.theta0 + (p.theta1 - p.theta0) * t)));
            }
        }
        let xi = (x - c).inv();
        let mut winding = T::zero();
        let mut area = T::zero();
        for k in 0..poly.len() {
            let (u, v) = (poly[k], poly[(k + 1) % poly.len()]);
            winding += ((v - xi) / (u - xi)).arg();
            area += cross(u, v);
        }
        let w = (winding / two_pi).round();
        w == T::one() || (w == T::zero() && area < T::zero())
    }
}

fn cross<T: Scalar>(a: Cx<T>, b: Cx<T>) -> T {
    a.re * b.im - a.im * b.re
}

fn dot<T: Scalar>(a: Cx<T>, b: Cx<T>) -> T {
    a.re * b.re + a.im * b.im
}

/// Whether two straight pieces meet anywhere other than the allowed points.
fn pieces_cross<T: Scalar>(
    (p1, d1, m1): (Cx<T>, Cx<T>, Option<T>),
    (p2, d2, m2): (Cx<T>, Cx<T>, Option<T>),
    allowed: &[Cx<T>],
    tol: T,
) -> bool {
    let in_range = |s: T, m: Option<T>, len: T| {
        let slack = tol / len;
        s >= -slack && m.is_none_or(|m| s <= m + slack)
    };
    let is_allowed = |z: Cx<T>| allowed.iter().any(|a| (*a - z).norm() <= tol * T::lit(100.0));
    let (l1, l2) = (d1.norm(), d2.norm());
    let den = cross(d1, d2);
    if den.abs() > T::lit(1e-12) * l1 * l2 {
        let r = p2 - p1;
        let s = cross(r, d2) / den;
        let t = cross(r, d1) / den;
        if in_range(s, m1, l1) && in_range(t, m2, l2) {
            return !is_allowed(p1 + d1 * s);
        }
        return false;
    }
    // parallel: only collinear overlaps matter
    if cross(p2 - p1, d1).abs() > tol * l1 {
        return false;
    }
    // p2's piece projected onto piece 1's parameter
    let proj = |z: Cx<T>| dot(z - p1, d1) / (l1 * l1);
    let s_start = proj(p2);
    let dir = dot(d2, d1).signum();
    let s_end = m2.map(|m| proj(p2 + d2 * m));
    let (lo2, hi2) = match s_end {
        Some(e) => (s_start.min(e), s_start.max(e)),
        None if dir > T::zero() => (s_start, T::infinity()),
        None => (T::neg_infinity(), s_start),
    };
    let lo = lo2.max(T::zero());
    let hi = hi2.min(m1.unwrap_or(T::infinity()));
    if hi < lo - tol / l1 {
        return false;
    }
    if (hi - lo) * l1 > tol {
        return true;
    }
    !is_allowed(p1 + d1 * lo)
}

/// The extended real line through the (real) critical values, increasing, with
/// infinity last; the blue tile is the upper half plane.
pub fn real_line_gamma<T: Scalar>(cd: &CriticalData<T>) -> Result<JordanPath<T>> {
    real_line_through(&cd.critical_values)
}

pub fn real_line_through<T: Scalar>(values: &[SpherePoint<T>]) -> Result<JordanPath<T>> {
    let mut finite: Vec<Cx<T>> = Vec::new();
    let mut has_inf = false;
    for v in values {
        match v {
            SpherePoint::Infinity => has_inf = true,
            SpherePoint::Finite(z) => {
                if z.im.abs() > T::lit(1e-9) * (T::one() + z.norm()) {
                    return Err(Error::NotFortunate(format!("{}", v)));
                }
                finite.push(*z);
            }
        }
    }
    finite.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal));
    let mut vertices: Vec<SpherePoint<T>> = finite.iter().map(|&z| SpherePoint::Finite(z)).collect();
    let mut segments = Vec::new();
    for w in finite.windows(2) {
        segments.push(Segment::Finite { a: w[0], b: w[1] });
    }
    let (first, last) = match (finite.first(), finite.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::InvalidPath("no finite critical values".into())),
    };
    if has_inf {
        vertices.push(SpherePoint::Infinity);
        segments.push(Segment::RayOut { a: last, dir: creal(T::one()) });
        segments.push(Segment::RayIn { b: first, dir: creal(-T::one()) });
    } else {
        segments.push(Segment::ThroughInfinity { a: last, b: first });
    }
    JordanPath::new(vertices, segments)
}

/// The real line when every critical value is real, otherwise the polygon through
/// the values in [`default_cyclic_order`].
pub fn default_gamma<T: Scalar>(cd: &CriticalData<T>) -> Result<JordanPath<T>> {
    match real_line_gamma(cd) {
        Err(Error::NotFortunate(_)) => {
            polygonal_gamma(&cd.critical_values, &default_cyclic_order(&cd.critical_values))
        }
        other => other,
    }
}

/// Explicit directions for the rays leaving towards and arriving from infinity.
#[derive(Clone, Copy, Debug, Default)]
pub struct RayDirections<T: Scalar> {
    /// Direction of the ray leaving the vertex before infinity.
    pub out: Option<Cx<T>>,
    /// Direction, as seen from the vertex after infinity, of the incoming ray.
    pub into: Option<Cx<T>>,
}

/// Polygon visiting `values` in the cyclic order `order`.
pub fn polygonal_gamma<T: Scalar>(values: &[SpherePoint<T>], order: &[usize]) -> Result<JordanPath<T>> {
    polygonal_gamma_with(values, order, &RayDirections::default())
}

pub fn polygonal_gamma_with<T: Scalar>(
    values: &[SpherePoint<T>],
    order: &[usize],
    rays: &RayDirections<T>,
) -> Result<JordanPath<T>> {
    let q = values.len();
    let mut seen = vec![false; q];
    if order.len() != q || order.iter().any(|&i| i >= q || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidInput("order is not a permutation of the values".into()));
    }
    if q < 2 {
        return Err(Error::InvalidPath("fewer than two vertices".into()));
    }
    let vertices: Vec<SpherePoint<T>> = order.iter().map(|&i| values[i]).collect();
    let finite: Vec<Cx<T>> = vertices.iter().filter_map(|v| v.as_finite()).collect();
    let centroid = finite.iter().fold(creal(T::zero()), |a, &z| a + z) / T::from_usize_lossy(finite.len().max(1));
    let scale = T::one() + finite.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let small = T::lit(1e-9) * scale;
    let unit = |d: Cx<T>| d / d.norm();

    let mut segments = Vec::with_capacity(q);
    for k in 0..q {
        let (u, v) = (vertices[k], vertices[(k + 1) % q]);
        let seg = match (u, v) {
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                if k == q - 1 && !vertices.iter().any(|x| x.is_infinite()) && collinear(&finite, small) {
                    Segment::ThroughInfinity { a, b }
                } else {
                    Segment::Finite { a, b }
                }
            }
            (SpherePoint::Finite(a), SpherePoint::Infinity) => {
                let prev = vertices[(k + q - 1) % q].as_finite();
                let dir = rays.out.unwrap_or_else(|| {
                    if (a - centroid).norm() > small {
                        unit(a - centroid)
                    } else {
                        match prev {
                            Some(p) if (a - p).norm() > small => unit(a - p),
                            _ => creal(T::one()),
                        }
                    }
                });
                Segment::RayOut { a, dir }
            }
            (SpherePoint::Infinity, SpherePoint::Finite(b)) => {
                let next = vertices[(k + 2) % q].as_finite();
                let dir = rays.into.unwrap_or_else(|| {
                    if (b - centroid).norm() > small {
                        unit(b - centroid)
                    } else {
                        match next {
                            Some(p) if (b - p).norm() > small => unit(b - p),
                            _ => creal(-T::one()),
                        }
                    }
                });
                Segment::RayIn { b, dir }
            }
            (SpherePoint::Infinity, SpherePoint::Infinity) => {
                return Err(Error::InvalidPath("infinity listed twice".into()));
            }
        };
        segments.push(seg);
    }
    // a ray pair from a single finite value needs distinct directions
    if q == 2 {
        if let (Segment::RayOut { dir: d1, .. }, Segment::RayIn { b, dir: d2 }) = (segments[0], segments[1]) {
            if (d1 - d2).norm() <= small && rays.into.is_none() {
                segments[1] = Segment::RayIn { b, dir: -d1 };
            }
        }
    }
    JordanPath::new(vertices, segments)
}

fn collinear<T: Scalar>(pts: &[Cx<T>], tol: T) -> bool {
    let Some(&p0) = pts.first() else { return true };
    let Some(&p1) = pts.iter().find(|z| (**z - p0).norm() > tol) else { return true };
    let d = (p1 - p0) / (p1 - p0).norm();
    pts.iter().all(|&z| cross(z - p0, d).abs() <= tol)
}

/// Default cyclic order: collinear values in increasing order along their line,
/// otherwise counterclockwise around the centroid of the finite values; infinity
/// last. Falls back to 2-opt uncrossing when the angular tour is not Jordan.
pub fn default_cyclic_order<T: Scalar>(values: &[SpherePoint<T>]) -> Vec<usize> {
    let fin: Vec<usize> = (0..values.len()).filter(|&i| !values[i].is_infinite()).collect();
    let inf: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_infinite()).collect();
    let pts: Vec<Cx<T>> = fin.iter().map(|&i| values[i].as_finite().unwrap()).collect();
    let scale = T::one() + pts.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let small = T::lit(1e-9) * scale;

    let with_inf = |mut order: Vec<usize>| {
        order.extend(inf.iter().copied());
        order
    };
    if pts.len() <= 2 || collinear(&pts, small) {
        let mut idx: Vec<usize> = (0..pts.len()).collect();
        let d = pts
            .iter()
            .find(|z| (**z - pts[0]).norm() > small)
            .map(|&z| z - pts[0])
            .unwrap_or_else(|| creal(T::one()));
        // orient the line so that "increasing" means increasing real part (or imaginary part when vertical)
        let d = if d.re < -small || (d.re.abs() <= small && d.im < T::zero()) { -d } else { d };
        idx.sort_by(|&a, &b| {
            dot(pts[a], d)
                .partial_cmp(&dot(pts[b], d))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        return with_inf(idx.into_iter().map(|i| fin[i]).collect());
    }
    let centroid = pts.iter().fold(creal(T::zero()), |a, &z| a + z) / T::from_usize_lossy(pts.len());
    let two_pi = T::PI() + T::PI();
    let angle = |z: Cx<T>| {
        let a = (z - centroid).arg();
        if a < T::zero() { a + two_pi } else { a }
    };
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        angle(pts[a])
            .partial_cmp(&angle(pts[b]))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((pts[a] - centroid).norm().partial_cmp(&(pts[b] - centroid).norm()).unwrap_or(std::cmp::Ordering::Equal))
    });
    let is_jordan = |order: &[usize]| {
        let full = with_inf(order.iter().map(|&i| fin[i]).collect());
        polygonal_gamma(values, &full).is_ok()
    };
    // rotations, so that infinity can sit between any two consecutive values
    for r in 0..idx.len() {
        let mut rot = idx.clone();
        rot.rotate_left(r);
        if is_jordan(&rot) {
            return with_inf(rot.into_iter().map(|i| fin[i]).collect());
        }
        if inf.is_empty() {
            break;
        }
    }
    // 2-opt: reverse the stretch between two crossing edges until nothing crosses
    let mut tour = idx.clone();
    let m = tour.len();
    for _ in 0..(m * m * 4) {
        let mut improved = false;
        'outer: for i in 0..m {
            for j in (i + 2)..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let (a, b) = (pts[tour[i]], pts[tour[i + 1]]);
                let (c, d) = (pts[tour[j]], pts[tour[(j + 1) % m]]);
                if pieces_cross((a, b - a, Some(T::one())), (c, d - c, Some(T::one())), &[], small) {
                    tour[i + 1..=j].reverse();
                    improved = true;
                    break 'outer;
                }
            }
        }
        if !improved {
            break;
        }
    }
    for r in 0..m {
        let mut rot = tour.clone();
        rot.rotate_left(r);
        if is_jordan(&rot) {
            return with_inf(rot.into_iter().map(|i| fin[i]).collect());
        }
    }
    with_inf(idx.into_iter().map(|i| fin[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = SpherePoint<f64>;

    fn unit_square() -> Vec<S> {
        vec![S::real(1.0), S::finite(0.0, 1.0), S::real(-1.0), S::finite(0.0, -1.0)]
    }

    #[test]
    fn convex_quadrilateral() {
        let g = polygonal_gamma(&unit_square(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(g.q(), 4);
        assert!(g.is_jordan_in_inverse_chart(64));
        assert!(matches!(polygonal_gamma(&unit_square(), &[1, 0, 2, 3]), Err(Error::NotJordan(_))));
    }

    #[test]
    fn through_infinity_vertex() {
        let vals = vec![S::real(0.0), S::real(1.0), S::Infinity];
        let g = polygonal_gamma(&vals, &[0, 1, 2]).unwrap();
        assert!(matches!(g.segments()[1], Segment::RayOut { .. }));
        assert!(matches!(g.segments()[2], Segment::RayIn { .. }));
        assert!(g.is_jordan_in_inverse_chart(128));
        assert_eq!(default_cyclic_order(&vals), vec![0, 1, 2]);
    }

    #[test]
    fn real_line() {
        let vals = vec![S::real(2.0), S::Infinity, S::real(-1.0), S::real(0.5)];
        let g = real_line_through(&vals).unwrap();
        assert_eq!(g.vertices()[0], S::real(-1.0));
        assert!(g.vertices()[3].is_infinite());
        assert_eq!(g.label(3), 4);
        let g = real_line_through(&[S::real(0.0), S::Infinity]).unwrap();
        assert_eq!(g.q(), 2);
        assert!(matches!(real_line_through(&[S::finite(1.0, 1.0), S::real(0.0)]), Err(Error::NotFortunate(_))));
        // two finite values close through infinity
        let g = real_line_through(&[S::real(0.0), S::real(1.0)]).unwrap();
        assert!(g.segments()[1].passes_infinity());
        assert!(g.is_jordan_in_inverse_chart(128));
    }

    #[test]
    fn default_orders() {
        assert_eq!(default_cyclic_order(&unit_square()), vec![0, 1, 2, 3]);
        let line = vec![S::real(3.0), S::real(-2.0), S::real(0.0)];
        assert_eq!(default_cyclic_order(&line), vec![1, 2, 0]);
        let g = polygonal_gamma(&line, &default_cyclic_order(&line)).unwrap();
        assert!(g.segments()[2].passes_infinity());
    }

    #[test]
    fn parametrization_hits_endpoints() {
        let vals = vec![S::finite(0.3, -0.2), S::finite(1.0, 2.0), S::Infinity];
        let g = polygonal_gamma(&vals, &[0, 1, 2]).unwrap();
        for s in g.segments() {
            let p = s.param();
            assert!(p.at(0.0).chordal_distance(&s.start()) < 1e-12);
            assert!(p.at(1.0).chordal_distance(&s.end()) < 1e-12);
        }
        let line = real_line_through(&[S::real(0.0), S::real(1.0)]).unwrap();
        let p = line.segments()[1].param();
        assert!(p.at(0.5).finite_norm() > 1.0 || p.at(0.5).is_infinite());
        assert!(p.at(1.0).chordal_distance(&S::real(0.0)) < 1e-12);
    }

    #[test]
    fn blue_side() {
        let line = real_line_through(&[S::real(0.0), S::real(1.0), S::Infinity]).unwrap();
        assert!(line.blue_contains(Cx::new(0.3, 1.0)));
        assert!(line.blue_contains(Cx::new(-40.0, 0.01)));
        assert!(!line.blue_contains(Cx::new(0.3, -1.0)));
        let ccw = polygonal_gamma(&unit_square(), &[0, 1, 2, 3]).unwrap();
        assert!(ccw.blue_contains(Cx::new(0.1, 0.0)));
        assert!(!ccw.blue_contains(Cx::new(3.0, 0.0)));
        let cw = polygonal_gamma(&unit_square(), &[3, 2, 1, 0]).unwrap();
        assert!(!cw.blue_contains(Cx::new(0.1, 0.0)));
        assert!(cw.blue_contains(Cx::new(3.0, 0.0)));
        assert!(ccw.segment_crosses(Cx::new(0.0, 0.0), Cx::new(3.0, 0.1)));
        assert!(!ccw.segment_crosses(Cx::new(0.0, 0.0), Cx::new(0.2, 0.1)));
    }
}
