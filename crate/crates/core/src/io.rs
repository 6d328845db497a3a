//! JSON formats for every artifact, with a deterministic writer: keys sorted,
//! integers printed as integers, floats with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::critical::{riemann_hurwitz_genus, CriticalData};
use crate::error::{Error, Result};
use crate::gamma::{polygonal_gamma_with, JordanPath, RayDirections, Segment};
use crate::labelling::QLabelling;
use crate::monodromy::{Constellation, SurgeryPlan, Tile};
use crate::numfield::{Polynomial, RationalFunction, SpherePoint};
use crate::scalar::Cx;
use crate::surfmap::CombinatorialMap;
use crate::trace::EmbeddedRMap;

/// Serializes `v` with sorted keys, two-space indentation, and fixed float
/// formatting. Arrays holding only scalars stay on one line.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_number(out: &mut String, n: &serde_json::Number) {
    if let Some(i) = n.as_i64() {
        write!(out, "{}", i).unwrap();
    } else if let Some(u) = n.as_u64() {
        write!(out, "{}", u).unwrap();
    } else {
        let f = n.as_f64().unwrap_or(f64::NAN);
        write!(out, "{:.16e}", f).unwrap();
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) if items.iter().all(is_scalar) || items.iter().all(is_point) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let sorted: BTreeMap<&String, &Value> = map.iter().collect();
            out.push_str("{\n");
            for (i, (k, x)) in sorted.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                if i + 1 < sorted.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// `[re, im]` pairs are kept inline inside their parent array.
fn is_point(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number)) || v.is_string()
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex_to_json(z: Cx<f64>) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

/// `[re, im]`, or the string `"inf"`.
pub fn point_to_json(p: &SpherePoint<f64>) -> Value {
    match p {
        SpherePoint::Infinity => Value::String("inf".into()),
        SpherePoint::Finite(z) => complex_to_json(*z),
    }
}

fn bad(what: impl Into<String>) -> Error {
    Error::InvalidInput(what.into())
}

/// Accepts `[re, im]` or a bare real number.
pub fn complex_from_json(v: &Value) -> Result<Cx<f64>> {
    match v {
        Value::Number(n) => Ok(Cx::new(n.as_f64().ok_or_else(|| bad("bad number"))?, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| bad("complex entries must be numbers"))?;
            let im = a[1].as_f64().ok_or_else(|| bad("complex entries must be numbers"))?;
            Ok(Cx::new(re, im))
        }
        _ => Err(bad(format!("expected [re, im], found {}", v))),
    }
}

pub fn point_from_json(v: &Value) -> Result<SpherePoint<f64>> {
    match v {
        Value::String(s) if s == "inf" || s == "infinity" => Ok(SpherePoint::Infinity),
        _ => complex_from_json(v).map(SpherePoint::Finite),
    }
}

fn usize_field(obj: &Value, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| bad(format!("missing or non-integer field \"{}\"", key)))
}

fn array_field<'a>(obj: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    obj.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("missing array field \"{}\"", key)))
}

fn usize_list(v: &Value) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| bad("expected an integer list"))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad("expected an integer")))
        .collect()
}

/// Object keyed by decimal ids, or an array indexed by id.
fn indexed<'a>(v: &'a Value, len: usize, what: &str) -> Result<Vec<Option<&'a Value>>> {
    let mut out = vec![None; len];
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let i: usize = k.parse().map_err(|_| bad(format!("{} key \"{}\" is not an id", what, k)))?;
                if i >= len {
                    return Err(bad(format!("{} id {} out of range", what, i)));
                }
                out[i] = Some(x);
            }
        }
        Value::Array(a) => {
            if a.len() != len {
                return Err(bad(format!("{} list has {} entries, expected {}", what, a.len(), len)));
            }
            for (i, x) in a.iter().enumerate() {
                out[i] = Some(x);
            }
        }
        _ => return Err(bad(format!("{} must be an object or array", what))),
    }
    Ok(out)
}

// ---------------------------------------------------------------- functions

pub fn function_to_json(f: &RationalFunction<f64>) -> Value {
    let coeffs = |p: &Polynomial<f64>| Value::Array(p.coeffs().iter().map(|&c| complex_to_json(c)).collect());
    json!({ "num": coeffs(f.num()), "den": coeffs(f.den()) })
}

pub fn function_from_json(v: &Value) -> Result<RationalFunction<f64>> {
    let poly = |key: &str| -> Result<Polynomial<f64>> {
        let cs = array_field(v, key)?.iter().map(complex_from_json).collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::new(cs))
    };
    RationalFunction::new(poly("num")?, poly("den")?)
}

pub fn critical_report(f: &RationalFunction<f64>, cd: &CriticalData<f64>) -> Value {
    let wr = f.critical_numerator();
    let scale = wr.max_abs_coeff().max(f64::MIN_POSITIVE);
    let residual = cd
        .critical_points
        .iter()
        .filter_map(|c| c.point.as_finite())
        .map(|z| wr.eval(z).norm() / scale)
        .fold(0.0, f64::max);
    let mults: Vec<usize> = cd.critical_points.iter().map(|c| c.ramification).collect();
    let expected = 2 * cd.degree + 2 * cd.genus - 2;
    json!({
        "degree": cd.degree,
        "m": cd.m(),
        "q": cd.q(),
        "critical_points": cd.critical_points.iter().map(|c| json!({
            "point": point_to_json(&c.point),
            "multiplicity": c.ramification,
            "value": c.value_index + 1,
        })).collect::<Vec<_>>(),
        "critical_values": cd.critical_values.iter().map(point_to_json).collect::<Vec<_>>(),
        "riemann_hurwitz": {
            "ramification_sum": cd.ramification_sum(),
            "expected": expected,
            "ok": cd.ramification_sum() == expected && riemann_hurwitz_genus(cd.degree, &mults).is_ok(),
        },
        "max_scaled_residual": float(residual),
    })
}

// ---------------------------------------------------------------- maps

pub fn map_to_json(m: &CombinatorialMap) -> Value {
    let vertices: Vec<Value> = (0..m.vertex_count())
        .map(|v| json!({ "id": v, "rot": m.rotation(v) }))
        .collect();
    let half_edges: Vec<Value> = (0..m.half_edge_count())
        .map(|h| json!({ "id": h, "twin": m.twin(h), "origin": m.origin(h) }))
        .collect();
    let mut obj = json!({
        "vertices": vertices,
        "half_edges": half_edges,
        "blue_face_halfedge": m.blue_seed(),
    });
    if let Some(l) = m.labelling() {
        obj["q"] = json!(l.q);
        obj["labels"] = labels_object(l);
    }
    obj
}

fn labels_object(l: &QLabelling) -> Value {
    let m: Map<String, Value> = l.labels.iter().enumerate().map(|(v, &x)| (v.to_string(), json!(x))).collect();
    Value::Object(m)
}

pub fn map_from_json(v: &Value) -> Result<CombinatorialMap> {
    let hs = array_field(v, "half_edges")?;
    let n = hs.len();
    let mut twin = vec![usize::MAX; n];
    let mut origin = vec![usize::MAX; n];
    for h in hs {
        let id = usize_field(h, "id")?;
        if id >= n {
            return Err(bad(format!("half-edge id {} out of range", id)));
        }
        twin[id] = usize_field(h, "twin")?;
        origin[id] = usize_field(h, "origin")?;
    }
    if twin.contains(&usize::MAX) {
        return Err(bad("half-edge ids must be 0..H-1"));
    }
    let vs = array_field(v, "vertices")?;
    let mut rotations = vec![Vec::new(); vs.len()];
    for x in vs {
        let id = usize_field(x, "id")?;
        if id >= vs.len() {
            return Err(bad(format!("vertex id {} out of range", id)));
        }
        rotations[id] = usize_list(x.get("rot").ok_or_else(|| bad("vertex without \"rot\""))?)?;
    }
    if origin.iter().any(|&o| o >= vs.len()) {
        return Err(Error::MalformedMap("half-edge origin is not a vertex".into()));
    }
    let seed = v.get("blue_face_halfedge").and_then(Value::as_u64).unwrap_or(0) as usize;
    let m = CombinatorialMap::with_seed(twin, origin, rotations, seed)?;
    match v.get("labels") {
        Some(l) if !l.is_null() => {
            let labels = labels_from_value(l, m.vertex_count())?;
            let q = v
                .get("q")
                .and_then(Value::as_u64)
                .map(|q| q as usize)
                .unwrap_or_else(|| labels.iter().copied().max().unwrap_or(1));
            m.with_labelling(QLabelling::new(q, labels))
        }
        _ => Ok(m),
    }
}

fn labels_from_value(v: &Value, nv: usize) -> Result<Vec<usize>> {
    indexed(v, nv, "labels")?
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            x.and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| bad(format!("vertex {} has no integer label", i)))
        })
        .collect()
}

pub fn labelling_to_json(l: &QLabelling) -> Value {
    json!({ "q": l.q, "labels": labels_object(l) })
}

pub fn labelling_from_json(v: &Value, nv: usize) -> Result<QLabelling> {
    let q = usize_field(v, "q")?;
    if q == 0 {
        return Err(bad("q must be positive"));
    }
    let labels = labels_from_value(v.get("labels").ok_or_else(|| bad("missing \"labels\""))?, nv)?;
    Ok(QLabelling::new(q, labels))
}

pub fn embedded_to_json(e: &EmbeddedRMap<f64>) -> Value {
    let mut obj = map_to_json(&e.map);
    let coords: Map<String, Value> = e.coords.iter().enumerate().map(|(v, p)| (v.to_string(), point_to_json(p))).collect();
    let arcs: Map<String, Value> = (0..e.map.half_edge_count())
        .map(|h| {
            let pts = e.half_edge_polyline(h).iter().map(point_to_json).collect();
            (h.to_string(), Value::Array(pts))
        })
        .collect();
    obj["coords"] = Value::Object(coords);
    obj["arcs"] = Value::Object(arcs);
    obj["critical"] = json!(e.critical);
    obj
}

// ---------------------------------------------------------------- paths

pub fn gamma_to_json(g: &JordanPath<f64>) -> Value {
    json!({
        "vertices": g.vertices().iter().enumerate().map(|(k, v)| json!({
            "label": g.label(k),
            "point": point_to_json(v),
        })).collect::<Vec<_>>(),
        "through_infinity": g.infinity_segment(),
        "segments": g.segments().iter().map(|s| match *s {
            Segment::Finite { .. } => json!({ "kind": "finite" }),
            Segment::RayOut { dir, .. } => json!({ "kind": "ray_out", "dir": complex_to_json(dir) }),
            Segment::RayIn { dir, .. } => json!({ "kind": "ray_in", "dir": complex_to_json(dir) }),
            Segment::ThroughInfinity { .. } => json!({ "kind": "through_infinity" }),
        }).collect::<Vec<_>>(),
    })
}

/// Reads a polygon: `"vertices"` in cyclic order (points, or objects with a
/// `"point"`), optional `"rays": {"out": [re, im], "into": [re, im]}` for the rays at
/// infinity, and optional `"through_infinity": k` to close segment `k` through infinity.
pub fn gamma_from_json(v: &Value) -> Result<JordanPath<f64>> {
    let vertices = array_field(v, "vertices")?
        .iter()
        .map(|x| point_from_json(x.get("point").unwrap_or(x)))
        .collect::<Result<Vec<_>>>()?;
    let mut rays = RayDirections::default();
    if let Some(r) = v.get("rays") {
        rays.out = r.get("out").map(complex_from_json).transpose()?;
        rays.into = r.get("into").map(complex_from_json).transpose()?;
    }
    let order: Vec<usize> = (0..vertices.len()).collect();
    let base = polygonal_gamma_with(&vertices, &order, &rays);
    match v.get("through_infinity").and_then(Value::as_u64) {
        None => base,
        Some(k) => {
            let k = k as usize;
            let q = vertices.len();
            if k >= q {
                return Err(bad("through_infinity index out of range"));
            }
            let (a, b) = match (vertices[k], vertices[(k + 1) % q]) {
                (SpherePoint::Finite(a), SpherePoint::Finite(b)) => (a, b),
                _ => return Err(Error::InvalidPath("a segment through infinity needs finite ends".into())),
            };
            let mut segs: Vec<Segment<f64>> = (0..q)
                .map(|i| match (vertices[i], vertices[(i + 1) % q]) {
                    (SpherePoint::Finite(a), SpherePoint::Finite(b)) => Ok(Segment::Finite { a, b }),
                    _ => Err(Error::InvalidPath("infinity cannot be a vertex when a segment passes through it".into())),
                })
                .collect::<Result<_>>()?;
            segs[k] = Segment::ThroughInfinity { a, b };
            JordanPath::new(vertices, segs)
        }
    }
}

// ---------------------------------------------------------------- constellations

pub fn constellation_to_json(c: &Constellation) -> Value {
    json!({ "n": c.n, "q": c.q, "sigmas": c.to_cycles() })
}

pub fn constellation_from_json(v: &Value) -> Result<Constellation> {
    let n = usize_field(v, "n")?;
    let sigmas = array_field(v, "sigmas")?
        .iter()
        .map(|s| {
            s.as_array()
                .ok_or_else(|| bad("each sigma is a list of cycles"))?
                .iter()
                .map(usize_list)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let c = Constellation::from_cycles(n, &sigmas)?;
    if let Some(q) = v.get("q").and_then(Value::as_u64) {
        if q as usize != c.q {
            return Err(bad(format!("q = {} but {} permutations given", q, c.q)));
        }
    }
    Ok(c)
}

pub fn surgery_to_json(p: &SurgeryPlan) -> Value {
    let tile = |t: &Tile| match *t {
        Tile::Blue(i) => json!(["blue", i]),
        Tile::Gray(i) => json!(["gray", i]),
    };
    json!({
        "n": p.n,
        "q": p.q,
        "polygon": p.polygon.iter().map(point_to_json).collect::<Vec<_>>(),
        "gluings": p.gluings.iter().map(|g| json!({ "edge": g.edge, "blue": g.blue, "gray": g.gray })).collect::<Vec<_>>(),
        "cone_points": p.cone_points.iter().map(|c| json!({
            "label": c.label,
            "multiple": c.multiple,
            "cone_angle_over_pi": 2 * c.multiple,
            "corners": c.corners.iter().map(tile).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "euler_characteristic": p.euler_characteristic(),
    })
}

/// Parses JSON text, mapping syntax errors to [`Error::InvalidInput`].
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {}", e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn canonical_numbers() {
        let v = json!({"b": 1, "a": [0.1, -2.5e-300], "c": "inf"});
        let s = to_canonical_string(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [1.0000000000000001e-1, -2.5000000000000000e-300],\n  \"b\": 1,\n  \"c\": \"inf\"\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][0].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn function_round_trip() {
        let f = fixtures::example_function();
        let g = function_from_json(&parse(&to_canonical_string(&function_to_json(&f))).unwrap()).unwrap();
        assert_eq!(f.num(), g.num());
        assert_eq!(f.den(), g.den());
        let short = parse(r#"{"num": [0, 0, 1], "den": [1]}"#).unwrap();
        assert_eq!(function_from_json(&short).unwrap().degree(), 2);
    }

    #[test]
    fn map_round_trip() {
        let m = fixtures::torus_chessboard(1);
        let back = map_from_json(&map_to_json(&m)).unwrap();
        assert_eq!(back, m);
        let c = crate::monodromy::constellation_from_rmap(&m).unwrap();
        assert_eq!(constellation_from_json(&constellation_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn gamma_round_trip() {
        let v = parse(r#"{"vertices": [[0, 0], [1, 0], "inf"], "rays": {"out": [0, 1], "into": [-1, 1]}}"#).unwrap();
        let g = gamma_from_json(&v).unwrap();
        assert_eq!(g.q(), 3);
        let v = parse(r#"{"vertices": [[0, 0], [1, 0], [2, 0]], "through_infinity": 2}"#).unwrap();
        assert_eq!(gamma_from_json(&v).unwrap().infinity_segment(), Some(2));
    }
}
