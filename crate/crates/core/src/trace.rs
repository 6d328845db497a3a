//! Lifting a Jordan path through the critical values to the pullback R-map by
//! numerical path continuation, and monodromy of the fibers around each value.
//!
//! Every sheet is tracked as a root of `beta num(z) - alpha den(z)` for a target
//! given in homogeneous coordinates `(alpha, beta)`, in the `z` chart or, near
//! infinity, in the `zeta = 1 / z` chart with reversed polynomials.

use crate::critical::{critical_data, critical_fiber, CriticalData};
use crate::error::{Error, Result};
use crate::gamma::{JordanPath, Segment, SegmentParam};
use crate::labelling::{check_consistent, QLabelling};
use crate::monodromy::Constellation;
use crate::numfield::{roots, Polynomial, RationalFunction, SpherePoint};
use crate::scalar::{creal, Cx, Scalar};
use crate::surfmap::CombinatorialMap;

/// Continuation tolerances.
#[derive(Clone, Copy, Debug)]
pub struct TraceOptions<T: Scalar> {
    /// Arcs stop this fraction of the parameter range short of a segment end.
    pub epsilon: T,
    /// First step as a fraction of the parameter range.
    pub initial_step: T,
    /// Smallest step, as a fraction of the range, before giving up.
    pub step_floor: T,
    /// How many times the end offset may be halved to resolve a snap.
    pub max_refinements: usize,
    /// A corrector move must stay below this fraction of the distance to the
    /// nearest other sheet.
    pub jump_factor: T,
}

impl<T: Scalar> Default for TraceOptions<T> {
    fn default() -> Self {
        TraceOptions {
            epsilon: T::lit(1e-3),
            initial_step: T::lit(1.0 / 64.0),
            step_floor: T::lit(1.0 / 65536.0),
            max_refinements: 8,
            jump_factor: T::lit(0.25),
        }
    }
}

/// A lift of one segment of the path: a polyline starting and ending at vertices.
#[derive(Clone, Debug)]
pub struct LiftedArc<T: Scalar> {
    /// Index of the path segment this arc lies over.
    pub segment: usize,
    /// Sample points, from the start vertex to the end vertex inclusive once snapped.
    pub samples: Vec<SpherePoint<T>>,
    pub start: Option<usize>,
    pub end: Option<usize>,
    /// Parameter values at which the unsnapped polyline stops.
    t_start: T,
    t_end: T,
}

/// A traced R-map: the combinatorial map, vertex positions, and one arc per edge.
///
/// Arc `a` carries half-edges `2a` (oriented along the path, blue on its left) and
/// `2a + 1`.
#[derive(Clone, Debug)]
pub struct EmbeddedRMap<T: Scalar> {
    pub map: CombinatorialMap,
    pub coords: Vec<SpherePoint<T>>,
    pub arcs: Vec<LiftedArc<T>>,
    /// Whether each vertex is a critical point.
    pub critical: Vec<bool>,
}

impl<T: Scalar> EmbeddedRMap<T> {
    /// Polyline of half-edge `h` from its origin to its target.
    pub fn half_edge_polyline(&self, h: usize) -> Vec<SpherePoint<T>> {
        let s = &self.arcs[h / 2].samples;
        if h.is_multiple_of(2) {
            s.clone()
        } else {
            s.iter().rev().copied().collect()
        }
    }
}

/// A target path in homogeneous coordinates.
#[derive(Clone, Copy, Debug)]
pub enum HomPath<T: Scalar> {
    Segment(SegmentParam<T>),
    /// `a + (b - a) t`, `t in [0, 1]`.
    Line { a: Cx<T>, b: Cx<T> },
    /// `center + radius e^(i t)`, `t in [phi0, phi1]`.
    Circle { center: Cx<T>, radius: T, phi0: T, phi1: T },
    /// `1 / (rho e^(i t))`, a small loop around infinity.
    InfinityCircle { rho: T, phi0: T, phi1: T },
}

impl<T: Scalar> HomPath<T> {
    pub fn range(&self) -> (T, T) {
        match *self {
            HomPath::Segment(p) => (p.theta0, p.theta1),
            HomPath::Line { .. } => (T::zero(), T::one()),
            HomPath::Circle { phi0, phi1, .. } | HomPath::InfinityCircle { phi0, phi1, .. } => (phi0, phi1),
        }
    }

    pub fn hom(&self, t: T) -> (Cx<T>, Cx<T>) {
        let one = creal(T::one());
        match *self {
            HomPath::Segment(p) => p.homogeneous(t),
            HomPath::Line { a, b } => (a + (b - a) * t, one),
            HomPath::Circle { center, radius, .. } => (center + Cx::from_polar(radius, t), one),
            HomPath::InfinityCircle { rho, .. } => (one, Cx::from_polar(rho, t)),
        }
    }

    pub fn hom_dt(&self, t: T) -> (Cx<T>, Cx<T>) {
        let zero = creal(T::zero());
        let i = Cx::new(T::zero(), T::one());
        match *self {
            HomPath::Segment(p) => p.homogeneous_derivative(t),
            HomPath::Line { a, b } => (b - a, zero),
            HomPath::Circle { radius, .. } => (i * Cx::from_polar(radius, t), zero),
            HomPath::InfinityCircle { rho, .. } => (zero, i * Cx::from_polar(rho, t)),
        }
    }

    pub fn point(&self, t: T) -> SpherePoint<T> {
        let (a, b) = self.hom(t);
        if b.norm() <= T::epsilon() * a.norm() {
            SpherePoint::Infinity
        } else {
            SpherePoint::from(a / b)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    Z,
    Zeta,
}

/// One sheet of the fiber: a coordinate in one of the two domain charts.
#[derive(Clone, Copy, Debug)]
struct Sheet<T: Scalar> {
    chart: Chart,
    x: Cx<T>,
}

impl<T: Scalar> Sheet<T> {
    fn from_point(p: SpherePoint<T>) -> Self {
        match p {
            SpherePoint::Infinity => Sheet { chart: Chart::Zeta, x: creal(T::zero()) },
            SpherePoint::Finite(z) if z.norm() > T::one() => Sheet { chart: Chart::Zeta, x: z.inv() },
            SpherePoint::Finite(z) => Sheet { chart: Chart::Z, x: z },
        }
    }

    fn point(&self) -> SpherePoint<T> {
        match self.chart {
            Chart::Z => SpherePoint::Finite(self.x),
            Chart::Zeta if self.x.norm_sqr() == T::zero() => SpherePoint::Infinity,
            Chart::Zeta => SpherePoint::Finite(self.x.inv()),
        }
    }

    /// Switches chart once the coordinate leaves the disk of radius 2.
    fn normalized(self) -> Self {
        if self.x.norm() > T::lit(2.0) {
            let chart = match self.chart {
                Chart::Z => Chart::Zeta,
                Chart::Zeta => Chart::Z,
            };
            Sheet { chart, x: self.x.inv() }
        } else {
            self
        }
    }
}

/// `beta num - alpha den` in both charts.
struct System<T: Scalar> {
    n: usize,
    num: Polynomial<T>,
    den: Polynomial<T>,
    num_rev: Polynomial<T>,
    den_rev: Polynomial<T>,
}

impl<T: Scalar> System<T> {
    fn new(f: &RationalFunction<T>) -> Self {
        System {
            n: f.degree(),
            num: f.num().clone(),
            den: f.den().clone(),
            num_rev: f.num_reversed(),
            den_rev: f.den_reversed(),
        }
    }

    fn polys(&self, chart: Chart) -> (&Polynomial<T>, &Polynomial<T>) {
        match chart {
            Chart::Z => (&self.num, &self.den),
            Chart::Zeta => (&self.num_rev, &self.den_rev),
        }
    }

    /// Residual and its derivative in the chart coordinate.
    fn eval(&self, chart: Chart, x: Cx<T>, (a, b): (Cx<T>, Cx<T>)) -> (Cx<T>, Cx<T>) {
        let (p, q) = self.polys(chart);
        let (pv, pd) = p.eval_with_derivative(x);
        let (qv, qd) = q.eval_with_derivative(x);
        (b * pv - a * qv, b * pd - a * qd)
    }

    /// Derivative of the residual along the target path.
    fn eval_dt(&self, chart: Chart, x: Cx<T>, (da, db): (Cx<T>, Cx<T>)) -> Cx<T> {
        let (p, q) = self.polys(chart);
        db * p.eval(x) - da * q.eval(x)
    }

    fn newton(&self, chart: Chart, mut x: Cx<T>, ab: (Cx<T>, Cx<T>)) -> Option<Cx<T>> {
        let tol = T::epsilon() * T::lit(1e3);
        for _ in 0..12 {
            let (v, d) = self.eval(chart, x, ab);
            if d.norm_sqr() == T::zero() || !d.norm().is_finite() {
                return None;
            }
            let dx = v / d;
            x -= dx;
            if !x.norm().is_finite() {
                return None;
            }
            if dx.norm() <= tol * (T::one() + x.norm()) {
                return Some(x);
            }
        }
        None
    }

    /// All `n` sheets over the target `(alpha, beta)`, or `None` when the fiber is
    /// not `n` well separated simple points.
    fn fiber(&self, ab: (Cx<T>, Cx<T>)) -> Option<Vec<Sheet<T>>> {
        let (a, b) = ab;
        let trim = T::epsilon() * T::lit(16.0);
        let mut out = Vec::with_capacity(self.n);
        for chart in [Chart::Z, Chart::Zeta] {
            let (p, q) = self.polys(chart);
            let poly = (&p.scale(b) - &q.scale(a)).trimmed(trim);
            if poly.degree() == 0 {
                continue;
            }
            for (r, k) in roots(&poly).ok()? {
                let inside = match chart {
                    Chart::Z => r.norm() <= T::one(),
                    Chart::Zeta => r.norm() < T::one(),
                };
                if !inside {
                    continue;
                }
                if k != 1 {
                    return None;
                }
                let x = self.newton(chart, r, ab).unwrap_or(r);
                out.push(Sheet { chart, x });
            }
        }
        if out.len() != self.n {
            return None;
        }
        let pts: Vec<SpherePoint<T>> = out.iter().map(|s| s.point()).collect();
        if min_separation(&pts).into_iter().fold(T::infinity(), T::min) < T::lit(1e-7) {
            return None;
        }
        Some(out)
    }
}

/// Chordal distance from each point to its nearest other point.
fn min_separation<T: Scalar>(pts: &[SpherePoint<T>]) -> Vec<T> {
    let mut sep = vec![T::infinity(); pts.len()];
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[i].chordal_distance(&pts[j]);
            sep[i] = sep[i].min(d);
            sep[j] = sep[j].min(d);
        }
    }
    sep
}

enum StepFailure {
    Diverged,
    Jump,
}

/// Tracks all sheets together from `t_from` to `t_to` along `path`, returning
/// the final sheets and, if `record`, the accepted samples of each sheet.
fn track<T: Scalar>(
    sys: &System<T>,
    path: &HomPath<T>,
    mut sheets: Vec<Sheet<T>>,
    t_from: T,
    t_to: T,
    opts: &TraceOptions<T>,
    record: bool,
) -> Result<(Vec<Sheet<T>>, Vec<Vec<SpherePoint<T>>>)> {
    let (r0, r1) = path.range();
    let full = (r1 - r0).abs();
    let dir = if t_to >= t_from { T::one() } else { -T::one() };
    let floor = full * opts.step_floor;
    let max_step = full / T::lit(16.0);
    let mut h = full * opts.initial_step;
    let mut t = t_from;
    let mut samples: Vec<Vec<SpherePoint<T>>> = vec![Vec::new(); sheets.len()];
    while (t_to - t) * dir > T::zero() {
        let remaining = (t_to - t) * dir;
        let hh = h.min(remaining);
        match try_step(sys, path, &sheets, t, t + dir * hh, opts) {
            Ok(next) => {
                sheets = next;
                t = if hh == remaining { t_to } else { t + dir * hh };
                if record {
                    for (s, sh) in samples.iter_mut().zip(&sheets) {
                        s.push(sh.point());
                    }
                }
                h = (h * T::lit(1.5)).min(max_step);
            }
            Err(why) => {
                h = hh / T::lit(2.0);
                if h < floor {
                    let at = path.point(t);
                    return Err(match why {
                        StepFailure::Jump => Error::PathJump(format!("sheets approach each other over {}", at)),
                        StepFailure::Diverged => Error::NonConvergence(format!("corrector diverged over {}", at)),
                    });
                }
            }
        }
    }
    Ok((sheets, samples))
}

fn try_step<T: Scalar>(
    sys: &System<T>,
    path: &HomPath<T>,
    sheets: &[Sheet<T>],
    t0: T,
    t1: T,
    opts: &TraceOptions<T>,
) -> std::result::Result<Vec<Sheet<T>>, StepFailure> {
    let ab0 = path.hom(t0);
    let dab0 = path.hom_dt(t0);
    let ab1 = path.hom(t1);
    let old: Vec<SpherePoint<T>> = sheets.iter().map(|s| s.point()).collect();
    let sep = min_separation(&old);
    let mut next = Vec::with_capacity(sheets.len());
    for (k, s) in sheets.iter().enumerate() {
        let (_, d) = sys.eval(s.chart, s.x, ab0);
        if d.norm_sqr() == T::zero() {
            return Err(StepFailure::Diverged);
        }
        let dx = -sys.eval_dt(s.chart, s.x, dab0) / d;
        let pred = s.x + dx * (t1 - t0);
        let x = sys.newton(s.chart, pred, ab1).ok_or(StepFailure::Diverged)?;
        let new = Sheet { chart: s.chart, x };
        let moved = new.point();
        let correction = Sheet { chart: s.chart, x: pred }.point().chordal_distance(&moved);
        if correction > opts.jump_factor * sep[k] || old[k].chordal_distance(&moved) > T::lit(0.3) * sep[k] {
            return Err(StepFailure::Jump);
        }
        next.push(new.normalized());
    }
    let pts: Vec<SpherePoint<T>> = next.iter().map(|s| s.point()).collect();
    if min_separation(&pts).into_iter().any(|d| d <= T::zero()) {
        return Err(StepFailure::Jump);
    }
    Ok(next)
}

/// Sheets over a regular point of `path` near the middle of the parameter range.
fn start_fiber<T: Scalar>(sys: &System<T>, path: &HomPath<T>) -> Result<(T, Vec<Sheet<T>>)> {
    let (r0, r1) = path.range();
    for frac in [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65, 0.3, 0.7] {
        let t = r0 + (r1 - r0) * T::lit(frac);
        if let Some(s) = sys.fiber(path.hom(t)) {
            return Ok((t, s));
        }
    }
    Err(Error::NonConvergence(format!(
        "no well separated fiber found along the segment through {}",
        path.point(r0 + (r1 - r0) / T::lit(2.0))
    )))
}

/// Lifts one path segment: `n` arcs stopping `epsilon` of the parameter range
/// short of both ends, not yet snapped to vertices.
pub fn lift_segment<T: Scalar>(
    f: &RationalFunction<T>,
    seg: &Segment<T>,
    index: usize,
    opts: &TraceOptions<T>,
) -> Result<Vec<LiftedArc<T>>> {
    lift_with(&System::new(f), seg, index, opts)
}

fn lift_with<T: Scalar>(
    sys: &System<T>,
    seg: &Segment<T>,
    index: usize,
    opts: &TraceOptions<T>,
) -> Result<Vec<LiftedArc<T>>> {
    let param = seg.param();
    let path = HomPath::Segment(param);
    let (t0, t1) = path.range();
    let (tm, mid) = start_fiber(sys, &path)?;
    let off = (t1 - t0) * opts.epsilon;
    let (_, back) = track(sys, &path, mid.clone(), tm, t0 + off, opts, true)?;
    let (_, fwd) = track(sys, &path, mid.clone(), tm, t1 - off, opts, true)?;
    Ok(mid
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut samples: Vec<SpherePoint<T>> = back[k].iter().rev().copied().collect();
            samples.push(s.point());
            samples.extend(fwd[k].iter().copied());
            LiftedArc { segment: index, samples, start: None, end: None, t_start: t0 + off, t_end: t1 - off }
        })
        .collect())
}

/// Nearest fiber point of each end, rejecting ambiguous or miscounted snaps.
fn try_snap<T: Scalar>(ends: &[SpherePoint<T>], fiber: &[(SpherePoint<T>, usize)]) -> Option<Vec<usize>> {
    let mut counts = vec![0; fiber.len()];
    let mut out = Vec::with_capacity(ends.len());
    for e in ends {
        let mut d: Vec<(T, usize)> = fiber
            .iter()
            .enumerate()
            .map(|(k, (p, _))| (e.chordal_distance(p), k))
            .collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        if d.len() > 1 && d[1].0 < T::lit(2.0) * d[0].0 {
            return None;
        }
        counts[d[0].1] += 1;
        out.push(d[0].1);
    }
    if counts.iter().zip(fiber).any(|(&c, (_, m))| c != *m) {
        return None;
    }
    Some(out)
}

/// Assigns each arc end to a point of the fiber over the corresponding segment end,
/// continuing the arcs closer to the end (halving the offset) while the assignment
/// is ambiguous. Snapped vertex positions are appended to the polylines.
pub fn snap_endpoints<T: Scalar>(
    f: &RationalFunction<T>,
    seg: &Segment<T>,
    arcs: &mut [LiftedArc<T>],
    start_fiber: &[(SpherePoint<T>, usize)],
    end_fiber: &[(SpherePoint<T>, usize)],
    opts: &TraceOptions<T>,
) -> Result<()> {
    snap_with(&System::new(f), seg, arcs, start_fiber, end_fiber, opts)
}

fn snap_with<T: Scalar>(
    sys: &System<T>,
    seg: &Segment<T>,
    arcs: &mut [LiftedArc<T>],
    start_fiber: &[(SpherePoint<T>, usize)],
    end_fiber: &[(SpherePoint<T>, usize)],
    opts: &TraceOptions<T>,
) -> Result<()> {
    let path = HomPath::Segment(seg.param());
    let (t0, t1) = path.range();
    for at_end in [false, true] {
        let (fiber, target) = if at_end { (end_fiber, t1) } else { (start_fiber, t0) };
        let mut t = if at_end { arcs[0].t_end } else { arcs[0].t_start };
        let mut sheets: Vec<Sheet<T>> = arcs
            .iter()
            .map(|a| Sheet::from_point(if at_end { *a.samples.last().unwrap() } else { a.samples[0] }))
            .collect();
        let mut refinements = 0;
        let assignment = loop {
            let ends: Vec<SpherePoint<T>> = sheets.iter().map(|s| s.point()).collect();
            if let Some(a) = try_snap(&ends, fiber) {
                break a;
            }
            if refinements == opts.max_refinements {
                return Err(Error::AmbiguousSnap(format!(
                    "arcs over {} -> {} do not resolve near {}",
                    seg.start(),
                    seg.end(),
                    path.point(target)
                )));
            }
            refinements += 1;
            let next = target + (t - target) / T::lit(2.0);
            let (s, extra) = track(sys, &path, sheets, t, next, opts, true)?;
            for (a, e) in arcs.iter_mut().zip(extra) {
                if at_end {
                    a.samples.extend(e);
                } else {
                    a.samples.splice(0..0, e.into_iter().rev());
                }
            }
            sheets = s;
            t = next;
        };
        for (a, k) in arcs.iter_mut().zip(assignment) {
            let v = fiber[k].0;
            if at_end {
                a.t_end = t;
                a.end = Some(k);
                a.samples.push(v);
            } else {
                a.t_start = t;
                a.start = Some(k);
                a.samples.insert(0, v);
            }
        }
    }
    Ok(())
}

/// Matches each vertex of `g` to a critical value of `f`.
fn vertex_values<T: Scalar>(cd: &CriticalData<T>, g: &JordanPath<T>) -> Result<Vec<usize>> {
    if g.q() != cd.q() {
        return Err(Error::InvalidPath(format!(
            "path has {} vertices but the map has {} critical values",
            g.q(),
            cd.q()
        )));
    }
    let mut used = vec![false; cd.q()];
    let mut out = Vec::with_capacity(g.q());
    for v in g.vertices() {
        let radius = T::lit(1e-6) * (T::one() + v.finite_norm());
        let j = cd
            .critical_values
            .iter()
            .position(|w| w.close_to(v, radius))
            .ok_or_else(|| Error::InvalidPath(format!("path vertex {} is not a critical value", v)))?;
        if std::mem::replace(&mut used[j], true) {
            return Err(Error::InvalidPath(format!("critical value {} visited twice", v)));
        }
        out.push(j);
    }
    Ok(out)
}

/// A half-edge leaving a vertex: its first two samples and the direction in which
/// its segment leaves the image vertex, in the target chart there.
#[derive(Clone, Copy)]
struct Leaving<T: Scalar> {
    h: usize,
    near: SpherePoint<T>,
    next: SpherePoint<T>,
    dir: Cx<T>,
}

/// Unit direction in which segment `k` (`outgoing`) or segment `k - 1` leaves path
/// vertex `k`, in the chart `1 / w` when that vertex is infinity.
fn target_direction<T: Scalar>(g: &JordanPath<T>, k: usize, outgoing: bool) -> Cx<T> {
    let q = g.q();
    if g.vertices()[k].is_infinite() {
        let d = match (outgoing, g.segments()[if outgoing { k } else { (k + q - 1) % q }]) {
            (true, Segment::RayIn { dir, .. }) | (false, Segment::RayOut { dir, .. }) => dir.conj(),
            _ => creal(T::one()),
        };
        d / d.norm()
    } else if outgoing {
        g.outgoing_direction(k)
    } else {
        g.incoming_direction(k)
    }
}

/// Counterclockwise order of the half-edges leaving a vertex `c` of local degree
/// `mu` over `w`.
///
/// In local charts `y = a x^mu`, so an arc leaving along target direction `d` has
/// tangent angle `(arg d - arg a + 2 pi k) / mu`; `a` is estimated once per vertex
/// from the closest sample and the branch `k` is the one nearest the arc's sample.
fn rotation_at<T: Scalar>(
    f: &RationalFunction<T>,
    c: &SpherePoint<T>,
    w: &SpherePoint<T>,
    mu: usize,
    leaving: Vec<Leaving<T>>,
) -> Vec<usize> {
    // the domain chart is `1 / z` away from the unit disk
    let x = |s: &SpherePoint<T>| match (c, s) {
        (SpherePoint::Finite(c), SpherePoint::Finite(s)) if c.norm() <= T::one() => *s - *c,
        (SpherePoint::Finite(c), SpherePoint::Finite(s)) => s.inv() - c.inv(),
        (SpherePoint::Infinity, SpherePoint::Finite(s)) => s.inv(),
        _ => creal(T::zero()),
    };
    let y = |s: &SpherePoint<T>| match (w, f.eval(*s)) {
        (SpherePoint::Finite(w), SpherePoint::Finite(v)) => v - *w,
        (SpherePoint::Infinity, SpherePoint::Finite(v)) => v.inv(),
        _ => creal(T::zero()),
    };
    let two_pi = T::PI() + T::PI();
    let m = T::from_usize_lossy(mu);
    let closest = leaving
        .iter()
        .map(|l| l.near)
        .fold(None, |b: Option<SpherePoint<T>>, s| match b {
            Some(b) if x(&b).norm() <= x(&s).norm() => Some(b),
            _ => Some(s),
        });
    let arg_a = closest.map_or(T::zero(), |s| (y(&s) / x(&s).powu(mu as u32)).arg());
    let wrap = |t: T| t - two_pi * (t / two_pi).floor();
    let mut keyed: Vec<(T, T, usize)> = leaving
        .iter()
        .map(|l| {
            let base = (l.dir.arg() - arg_a) / m;
            let seen = x(&l.near).arg();
            let step = two_pi / m;
            let k = ((seen - base) / step).round();
            let tangent = wrap(base + step * k);
            (tangent, x(&l.next).arg(), l.h)
        })
        .collect();
    let tie = T::lit(1e-9);
    keyed.sort_by(|p, r| {
        let o = if (p.0 - r.0).abs() <= tie { p.1.partial_cmp(&r.1) } else { p.0.partial_cmp(&r.0) };
        o.unwrap_or(std::cmp::Ordering::Equal)
    });
    keyed.into_iter().map(|t| t.2).collect()
}

/// The pullback R-map of `g` under `f`, with the pullback labelling: a vertex over
/// the path vertex `k` is labelled `k + 1`.
pub fn pullback_rmap<T: Scalar>(f: &RationalFunction<T>, g: &JordanPath<T>) -> Result<EmbeddedRMap<T>> {
    pullback_rmap_with(f, g, &TraceOptions::default())
}

pub fn pullback_rmap_with<T: Scalar>(
    f: &RationalFunction<T>,
    g: &JordanPath<T>,
    opts: &TraceOptions<T>,
) -> Result<EmbeddedRMap<T>> {
    let cd = critical_data(f)?;
    let values = vertex_values(&cd, g)?;
    let q = g.q();
    let n = f.degree();
    let fibers = values
        .iter()
        .map(|&j| critical_fiber(f, &cd, j).map(|fb| fb.points))
        .collect::<Result<Vec<_>>>()?;
    let sys = System::new(f);
    let lifted: Vec<Result<Vec<LiftedArc<T>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = g
            .segments()
            .iter()
            .enumerate()
            .map(|(k, seg)| {
                let (sys, fibers) = (&sys, &fibers);
                scope.spawn(move || {
                    let mut arcs = lift_with(sys, seg, k, opts)?;
                    snap_with(sys, seg, &mut arcs, &fibers[k], &fibers[(k + 1) % q], opts)?;
                    Ok(arcs)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("lifting thread panicked")).collect()
    });
    let mut arcs = Vec::with_capacity(n * q);
    for r in lifted {
        arcs.extend(r?);
    }

    let mut first_id = Vec::with_capacity(q);
    let mut coords = Vec::new();
    let mut critical = Vec::new();
    let mut labels = Vec::new();
    for (k, fb) in fibers.iter().enumerate() {
        first_id.push(coords.len());
        for (p, m) in fb {
            coords.push(*p);
            critical.push(*m > 1);
            labels.push(g.label(k));
        }
    }
    let nv = coords.len();
    let mut mult = vec![0; nv];
    let mut over = vec![0; nv];
    for (k, fb) in fibers.iter().enumerate() {
        for (i, (_, m)) in fb.iter().enumerate() {
            mult[first_id[k] + i] = *m;
            over[first_id[k] + i] = k;
        }
    }
    let mut origin = vec![0; 2 * arcs.len()];
    let mut twin = vec![0; 2 * arcs.len()];
    let mut leaving: Vec<Vec<Leaving<T>>> = vec![Vec::new(); nv];
    for (a, arc) in arcs.iter().enumerate() {
        let k = arc.segment;
        let u = first_id[k] + arc.start.expect("snapped");
        let v = first_id[(k + 1) % q] + arc.end.expect("snapped");
        let s = &arc.samples;
        let len = s.len();
        origin[2 * a] = u;
        origin[2 * a + 1] = v;
        twin[2 * a] = 2 * a + 1;
        twin[2 * a + 1] = 2 * a;
        leaving[u].push(Leaving { h: 2 * a, near: s[1], next: s[2], dir: target_direction(g, k, true) });
        leaving[v].push(Leaving {
            h: 2 * a + 1,
            near: s[len - 2],
            next: s[len - 3],
            dir: target_direction(g, (k + 1) % q, false),
        });
    }
    let rotations: Vec<Vec<usize>> = leaving
        .into_iter()
        .enumerate()
        .map(|(v, l)| rotation_at(f, &coords[v], &g.vertices()[over[v]], mult[v], l))
        .collect();
    if let Some(v) = rotations.iter().position(|r| r.is_empty()) {
        return Err(Error::InconsistentMap(format!("vertex {} received no arcs", coords[v])));
    }
    let map = CombinatorialMap::with_seed(twin, origin, rotations, 0)
        .map_err(|e| Error::InconsistentMap(format!("traced arcs do not form a map: {}", e)))?
        .with_labelling(QLabelling::new(q, labels))?;
    let cls = map.classify();
    if !cls.is_rmap {
        return Err(Error::InconsistentMap(format!("traced map is not an R-map: {}", cls.violations.join("; "))));
    }
    let verdict = check_consistent(&map, map.labelling().unwrap());
    if !verdict.consistent {
        return Err(Error::InconsistentMap(verdict.violations.join("; ")));
    }
    if map.face_count() != 2 * n || map.faces().iter().any(|fc| fc.len() != q) {
        return Err(Error::InconsistentMap(format!(
            "expected {} faces of length {}, found {}",
            2 * n,
            q,
            map.face_count()
        )));
    }
    Ok(EmbeddedRMap { map, coords, arcs, critical })
}

/// A regular basepoint in the blue tile, as far from the path as a small set of
/// candidates allows.
pub fn default_basepoint<T: Scalar>(g: &JordanPath<T>) -> Result<SpherePoint<T>> {
    candidates(g)
        .into_iter()
        .filter(|&c| g.blue_contains(c))
        .map(|c| (g.distance_to(c, &[]), c))
        .filter(|(d, _)| *d > T::zero())
        .fold(None, |best: Option<(T, Cx<T>)>, x| match best {
            Some(b) if b.0 >= x.0 => Some(b),
            _ => Some(x),
        })
        .map(|(_, c)| SpherePoint::Finite(c))
        .ok_or_else(|| Error::InvalidPath("no basepoint found in the blue tile".into()))
}

/// Points near the path on both sides, used for basepoints and detours.
fn candidates<T: Scalar>(g: &JordanPath<T>) -> Vec<Cx<T>> {
    let finite: Vec<Cx<T>> = g.vertices().iter().filter_map(|v| v.as_finite()).collect();
    let count = T::from_usize_lossy(finite.len().max(1));
    let centroid = finite.iter().fold(creal(T::zero()), |s, &z| s + z) / count;
    let spread = finite.iter().fold(T::zero(), |m, z| m.max((*z - centroid).norm())).max(T::one());
    let i = Cx::new(T::zero(), T::one());
    let mut out = vec![centroid];
    for s in [0.05, 0.15, 0.3, 0.6, 1.0, 2.0] {
        let s = T::lit(s) * spread;
        out.push(centroid + i * s);
        out.push(centroid - i * s);
        out.push(centroid + s);
        out.push(centroid - s);
    }
    for seg in g.segments() {
        let (m, d) = match *seg {
            Segment::Finite { a, b } => ((a + b) / T::lit(2.0), b - a),
            Segment::RayOut { a, dir } => (a + dir / dir.norm() * spread, dir),
            Segment::RayIn { b, dir } => (b + dir / dir.norm() * spread, -dir),
            Segment::ThroughInfinity { a, b } => (a + (a - b) / (a - b).norm() * spread, a - b),
        };
        let normal = i * d / d.norm();
        for s in [0.02, 0.1, 0.3, 0.8] {
            out.push(m + normal * (T::lit(s) * spread));
            out.push(m - normal * (T::lit(s) * spread));
        }
    }
    out
}

/// Distance from `p` to the straight segment `[a, b]`.
fn point_segment_distance<T: Scalar>(p: Cx<T>, a: Cx<T>, b: Cx<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let s = ((p - a).re * d.re + (p - a).im * d.im) / len2;
    (a + d * s.max(T::zero()).min(T::one()) - p).norm()
}

/// A polyline from `a` to `b` inside the blue tile, keeping as far as the
/// candidate detours allow from the path vertices other than `skip`.
fn blue_route<T: Scalar>(g: &JordanPath<T>, a: Cx<T>, b: Cx<T>, skip: usize) -> Result<Vec<Cx<T>>> {
    let others: Vec<Cx<T>> = g
        .vertices()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != skip)
        .filter_map(|(_, v)| v.as_finite())
        .collect();
    let mut spacing = T::infinity();
    for (i, x) in others.iter().enumerate() {
        for y in &others[i + 1..] {
            spacing = spacing.min((*x - *y).norm());
        }
        spacing = spacing.min((*x - b).norm());
    }
    let wanted = if spacing.is_finite() { T::lit(0.1) * spacing } else { T::zero() };
    let clearance = |route: &[Cx<T>]| -> T {
        if route.windows(2).any(|w| g.segment_crosses(w[0], w[1])) {
            return -T::one();
        }
        route
            .windows(2)
            .flat_map(|w| others.iter().map(move |&v| point_segment_distance(v, w[0], w[1])))
            .fold(T::infinity(), T::min)
    };
    let direct = vec![a, b];
    if clearance(&direct) >= wanted {
        return Ok(direct);
    }
    let blue: Vec<Cx<T>> = candidates(g).into_iter().filter(|&c| g.blue_contains(c)).collect();
    let mut best = (clearance(&direct), direct);
    for &m in &blue {
        let r = vec![a, m, b];
        let c = clearance(&r);
        if c > best.0 {
            best = (c, r);
        }
    }
    if best.0 < wanted {
        for &m1 in &blue {
            if clearance(&[a, m1]) <= best.0 {
                continue;
            }
            for &m2 in &blue {
                let r = vec![a, m1, m2, b];
                let c = clearance(&r);
                if c > best.0 {
                    best = (c, r);
                }
            }
        }
    }
    if best.0 <= T::zero() {
        return Err(Error::InvalidPath(format!("no route inside the blue tile from {} to {}", a, b)));
    }
    Ok(best.1)
}

/// Counterclockwise angle from `from` to `to` in `(0, 2 pi]`.
fn ccw_angle<T: Scalar>(from: Cx<T>, to: Cx<T>) -> T {
    let two_pi = T::PI() + T::PI();
    let d = (to / from).arg();
    if d <= T::zero() {
        d + two_pi
    } else {
        d
    }
}

/// Route from the basepoint out to a small loop around path vertex `k`, the loop
/// itself (counterclockwise on the sphere), and the way back.
fn loop_around<T: Scalar>(g: &JordanPath<T>, base: Cx<T>, k: usize) -> Result<Vec<HomPath<T>>> {
    let q = g.q();
    let two_pi = T::PI() + T::PI();
    let (approach, circle) = match g.vertices()[k] {
        SpherePoint::Finite(w) => {
            let out = g.outgoing_direction(k);
            let inc = g.incoming_direction(k);
            let bis = out.arg() + ccw_angle(out, inc) / T::lit(2.0);
            let scale = g.vertices().iter().fold(T::one(), |m, v| m.max(v.finite_norm()));
            let mut room = g.distance_to(w, &[(k + q - 1) % q, k]).min(scale).min((base - w).norm());
            for (i, v) in g.vertices().iter().enumerate() {
                if let (true, Some(z)) = (i != k, v.as_finite()) {
                    room = room.min((z - w).norm());
                }
            }
            let r = T::lit(0.3) * room;
            let p = w + Cx::from_polar(r, bis);
            (p, HomPath::Circle { center: w, radius: r, phi0: bis, phi1: bis + two_pi })
        }
        SpherePoint::Infinity => {
            let d_in = match g.segments()[(k + q - 1) % q] {
                Segment::RayOut { dir, .. } => dir,
                _ => return Err(Error::InvalidPath("infinity must be entered along a ray".into())),
            };
            let d_out = match g.segments()[k] {
                Segment::RayIn { dir, .. } => dir,
                _ => return Err(Error::InvalidPath("infinity must be left along a ray".into())),
            };
            let delta = ccw_angle(d_in, d_out);
            let m = g.vertices().iter().fold(T::zero(), |m, v| m.max(v.finite_norm()));
            let half = (delta / T::lit(2.0)).min(T::FRAC_PI_4());
            let big = T::lit(8.0) * (T::one() + m) / half.sin();
            let dirn = d_in.arg() + delta / T::lit(2.0);
            let p = Cx::from_polar(big, dirn);
            let psi = -dirn;
            (p, HomPath::InfinityCircle { rho: big.recip(), phi0: psi, phi1: psi + two_pi })
        }
    };
    let route = blue_route(g, base, approach, k)?;
    let mut out: Vec<HomPath<T>> = route.windows(2).map(|w| HomPath::Line { a: w[0], b: w[1] }).collect();
    out.push(circle);
    out.extend(route.windows(2).rev().map(|w| HomPath::Line { a: w[1], b: w[0] }));
    Ok(out)
}

/// Monodromy of the fiber over `basepoint` (in the blue tile) around each path
/// vertex: `sigma_{k+1}` is the permutation of sheets after one counterclockwise
/// loop around vertex `k`.
pub fn monodromy_by_continuation<T: Scalar>(
    f: &RationalFunction<T>,
    g: &JordanPath<T>,
    basepoint: SpherePoint<T>,
) -> Result<Constellation> {
    let opts = TraceOptions::default();
    let cd = critical_data(f)?;
    vertex_values(&cd, g)?;
    let base = basepoint
        .as_finite()
        .ok_or_else(|| Error::InvalidInput("basepoint must be finite".into()))?;
    if g.distance_to(base, &[]) <= T::zero() || !g.blue_contains(base) {
        return Err(Error::InvalidInput(format!("basepoint {} is not inside the blue tile", basepoint)));
    }
    let sys = System::new(f);
    let one = creal(T::one());
    let start = sys
        .fiber((base, one))
        .ok_or_else(|| Error::NonConvergence(format!("fiber over basepoint {} is degenerate", basepoint)))?;
    let start_pts: Vec<SpherePoint<T>> = start.iter().map(|s| s.point()).collect();
    let sep = min_separation(&start_pts);
    let mut sigmas = Vec::with_capacity(g.q());
    for k in 0..g.q() {
        let mut sheets = start.clone();
        for piece in loop_around(g, base, k)? {
            let (t0, t1) = piece.range();
            sheets = track(&sys, &piece, sheets, t0, t1, &opts, false)?.0;
        }
        let mut sigma = vec![usize::MAX; start.len()];
        for (i, s) in sheets.iter().enumerate() {
            let p = s.point();
            let (d, j) = start_pts
                .iter()
                .enumerate()
                .map(|(j, x)| (p.chordal_distance(x), j))
                .fold((T::infinity(), 0), |b, x| if x.0 < b.0 { x } else { b });
            if d > T::lit(0.01) * sep[j] {
                return Err(Error::PathJump(format!("loop around {} did not return to the fiber", g.vertices()[k])));
            }
            sigma[i] = j;
        }
        sigmas.push(sigma);
    }
    Constellation::new(f.degree(), sigmas).map_err(|_| Error::PathJump("loop continuation merged two sheets".into()))
}
