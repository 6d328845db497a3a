//! SVG figures of traced maps (affine view) and DOT text for combinatorial maps.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numfield::SpherePoint;
use crate::scalar::Scalar;
use crate::surfmap::{CombinatorialMap, FaceColor};
use crate::trace::EmbeddedRMap;

/// Axis-aligned window `[x0, x1] x [y0, y1]` in the z-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Viewport {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Viewport { x0, y0, x1, y1 }
    }

    fn has_area(&self) -> bool {
        let (w, h) = (self.x1 - self.x0, self.y1 - self.y0);
        w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0
    }
}

#[derive(Clone, Debug)]
pub struct RenderStyle {
    pub blue_fill: String,
    pub gray_fill: String,
    pub critical_color: String,
    pub cocritical_color: String,
    pub font_size: f64,
    /// `None` fits the finite vertices.
    pub viewport: Option<Viewport>,
    /// Upper bound on points drawn per arc.
    pub samples_per_arc: usize,
    /// Width of the picture in pixels.
    pub width: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            blue_fill: "#8fb8e8".into(),
            gray_fill: "#c8c8c8".into(),
            critical_color: "#d62728".into(),
            cocritical_color: "#2ca02c".into(),
            font_size: 12.0,
            viewport: None,
            samples_per_arc: 200,
            width: 800.0,
        }
    }
}

fn fit_viewport(points: &[Complex64]) -> Result<Viewport> {
    if points.is_empty() {
        return Err(Error::MissingCoords("no finite vertices".into()));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let side = (x1 - x0).max(y1 - y0).max(1.0) * 1.4;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    Ok(Viewport::new(cx - side / 2.0, cy - side / 2.0, cx + side / 2.0, cy + side / 2.0))
}

fn decimate<T: Scalar>(pts: &[SpherePoint<T>], max: usize) -> Vec<Option<Complex64>> {
    let conv = |p: &SpherePoint<T>| p.as_finite().map(|z| Complex64::new(z.re.as_f64(), z.im.as_f64()));
    let max = max.max(2);
    if pts.len() <= max {
        return pts.iter().map(conv).collect();
    }
    let step = (pts.len() - 1) as f64 / (max - 1) as f64;
    (0..max).map(|k| conv(&pts[((k as f64 * step).round() as usize).min(pts.len() - 1)])).collect()
}

/// Clipping disk around the viewport.
struct Disk {
    center: Complex64,
    radius: f64,
}

impl Disk {
    fn project(&self, z: Complex64) -> Complex64 {
        let d = z - self.center;
        if d.norm() > self.radius {
            self.center + d * (self.radius / d.norm())
        } else {
            z
        }
    }

    fn on_rim(&self, z: Complex64) -> bool {
        ((z - self.center).norm() - self.radius).abs() <= 1e-9 * self.radius
    }

    fn arc(&self, from: Complex64, to: Complex64, ccw: bool, out: &mut Vec<Complex64>) {
        let a = (from - self.center).arg();
        let mut span = (to - self.center).arg() - a;
        if ccw {
            span = span.rem_euclid(2.0 * PI);
        } else {
            span = (span + PI).rem_euclid(2.0 * PI) - PI;
        }
        let steps = (span.abs() / (PI / 64.0)).ceil() as usize;
        for k in 1..steps {
            let t = a + span * k as f64 / steps as f64;
            out.push(self.center + Complex64::from_polar(self.radius, t));
        }
    }
}

/// Closed outline of face `f`, clipped to the disk; the rim is followed counterclockwise
/// through an infinite vertex.
fn face_outline<T: Scalar>(e: &EmbeddedRMap<T>, f: usize, disk: &Disk, per_arc: usize) -> Vec<Complex64> {
    // (point, whether the gap before it passes through infinity)
    let mut pts: Vec<(Complex64, bool)> = Vec::new();
    let mut through_inf = false;
    for &h in &e.map.faces()[f] {
        let poly = decimate(&e.half_edge_polyline(h), per_arc);
        for p in &poly[..poly.len() - 1] {
            match p {
                Some(z) => {
                    pts.push((disk.project(*z), through_inf));
                    through_inf = false;
                }
                None => through_inf = true,
            }
        }
    }
    if let Some(first) = pts.first_mut() {
        first.1 |= through_inf;
    }
    let mut out = Vec::with_capacity(pts.len());
    for k in 0..pts.len() {
        let (z, via_inf) = pts[k];
        let prev = pts[(k + pts.len() - 1) % pts.len()].0;
        if via_inf {
            disk.arc(prev, z, true, &mut out);
        } else if disk.on_rim(prev) && disk.on_rim(z) {
            disk.arc(prev, z, false, &mut out);
        }
        out.push(z);
    }
    out
}

fn signed_area(pts: &[Complex64]) -> f64 {
    let n = pts.len();
    (0..n).map(|k| pts[k].re * pts[(k + 1) % n].im - pts[(k + 1) % n].re * pts[k].im).sum::<f64>() / 2.0
}

/// Affine view of a traced map as an SVG document.
pub fn render_svg<T: Scalar>(e: &EmbeddedRMap<T>, style: &RenderStyle) -> Result<String> {
    if e.coords.len() != e.map.vertex_count() || e.arcs.len() * 2 != e.map.half_edge_count() {
        return Err(Error::MissingCoords("map has no embedding".into()));
    }
    let finite: Vec<Complex64> = e
        .coords
        .iter()
        .filter_map(|p| p.as_finite())
        .map(|z| Complex64::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    let vp = match style.viewport {
        Some(v) if v.has_area() => v,
        Some(_) => return Err(Error::MissingCoords("viewport has zero area".into())),
        None => fit_viewport(&finite)?,
    };
    let disk = Disk {
        center: Complex64::new((vp.x0 + vp.x1) / 2.0, (vp.y0 + vp.y1) / 2.0),
        radius: Complex64::new(vp.x1 - vp.x0, vp.y1 - vp.y0).norm(),
    };
    let scale = style.width / (vp.x1 - vp.x0);
    let height = (vp.y1 - vp.y0) * scale;
    let px = |z: Complex64| ((z.re - vp.x0) * scale, (vp.y1 - z.im) * scale);
    let fill = |f: usize| match e.map.face_color(f) {
        FaceColor::Blue => &style.blue_fill,
        FaceColor::Gray => &style.gray_fill,
    };

    let outlines: Vec<Vec<Complex64>> = (0..e.map.face_count())
        .map(|f| face_outline(e, f, &disk, style.samples_per_arc))
        .collect();
    let areas: Vec<f64> = outlines.iter().map(|o| signed_area(o)).collect();
    // the face around infinity winds clockwise; otherwise the largest tile stands in for it
    let background = match areas.iter().position(|&a| a < 0.0) {
        Some(f) => f,
        None => (0..areas.len()).max_by(|&a, &b| areas[a].total_cmp(&areas[b])).unwrap_or(0),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        style.width, height, style.width, height
    );
    let _ = writeln!(
        s,
        r#"<rect class="background" data-face="{}" x="0" y="0" width="{:.3}" height="{:.3}" fill="{}"/>"#,
        background,
        style.width,
        height,
        fill(background)
    );
    for (f, outline) in outlines.iter().enumerate() {
        if f == background || outline.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, &z) in outline.iter().enumerate() {
            let (x, y) = px(z);
            let _ = write!(d, "{}{:.3} {:.3} ", if k == 0 { "M" } else { "L" }, x, y);
        }
        d.push('Z');
        let _ = writeln!(
            s,
            r#"<path class="tile" data-face="{}" d="{}" fill="{}" stroke="black" stroke-width="0.6"/>"#,
            f,
            d,
            fill(f)
        );
    }
    let r = style.font_size * 0.35;
    for (v, p) in e.coords.iter().enumerate() {
        let Some(z) = p.as_finite() else { continue };
        let z = Complex64::new(z.re.as_f64(), z.im.as_f64());
        if z.re < vp.x0 || z.re > vp.x1 || z.im < vp.y0 || z.im > vp.y1 {
            continue;
        }
        let (x, y) = px(z);
        let color = if e.critical[v] { &style.critical_color } else { &style.cocritical_color };
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="{:.2}" fill="{}"/>"#, x, y, r, color);
        let text = e.map.label(v).map_or_else(|| v.to_string(), |l| l.to_string());
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="{}" font-family="sans-serif">{}</text>"#,
            x + r * 1.5,
            y - r * 1.5,
            style.font_size,
            text
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Graphviz text: one node per vertex captioned `id` or `id:label`, one edge per twin pair.
pub fn render_dot(m: &CombinatorialMap) -> String {
    let mut s = String::from("graph map {\n");
    for v in 0..m.vertex_count() {
        let caption = match m.label(v) {
            Some(l) => format!("{v}:{l}"),
            None => v.to_string(),
        };
        let _ = writeln!(s, "  v{v} [label=\"{caption}\"];");
    }
    for h in 0..m.half_edge_count() {
        if h < m.twin(h) {
            let _ = writeln!(s, "  v{} -- v{};", m.origin(h), m.target(h));
        }
    }
    s.push_str("}\n");
    s
}
