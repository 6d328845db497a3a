//! Permutation constellations of labelled R-maps and the tile-gluing description
//! of the covering surface.
//!
//! Products are read left to right: applying `sigma_1` first, then `sigma_2`, and so
//! on up to `sigma_q`, gives the identity.

use crate::error::{Error, Result};
use crate::gamma::{real_line_through, JordanPath};
use crate::labelling::{check_consistent, QLabelling};
use crate::numfield::SpherePoint;
use crate::perm::{self, Perm};
use crate::scalar::Scalar;
use crate::surfmap::CombinatorialMap;

/// `q` permutations of `n` sheets (0-based internally).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constellation {
    pub n: usize,
    pub q: usize,
    pub sigmas: Vec<Perm>,
}

impl Constellation {
    pub fn new(n: usize, sigmas: Vec<Perm>) -> Result<Self> {
        if let Some(j) = sigmas.iter().position(|s| s.len() != n || !perm::is_permutation(s)) {
            return Err(Error::InvalidConstellation(format!("sigma_{} is not a permutation of {} sheets", j + 1, n)));
        }
        Ok(Constellation { n, q: sigmas.len(), sigmas })
    }

    /// Builds from 1-based cycle lists, one list per permutation.
    pub fn from_cycles(n: usize, cycles: &[Vec<Vec<usize>>]) -> Result<Self> {
        let mut sigmas = Vec::with_capacity(cycles.len());
        for (j, cs) in cycles.iter().enumerate() {
            let zero: Vec<Vec<usize>> = cs
                .iter()
                .map(|c| c.iter().map(|&x| x.wrapping_sub(1)).collect())
                .collect();
            let p = perm::from_cycles(n, &zero)
                .ok_or_else(|| Error::InvalidConstellation(format!("cycles of sigma_{} are malformed", j + 1)))?;
            sigmas.push(p);
        }
        Self::new(n, sigmas)
    }

    /// 1-based cycles (fixed points included) of each permutation.
    pub fn to_cycles(&self) -> Vec<Vec<Vec<usize>>> {
        self.sigmas
            .iter()
            .map(|s| {
                perm::cycles(s)
                    .into_iter()
                    .map(|c| c.into_iter().map(|x| x + 1).collect())
                    .collect()
            })
            .collect()
    }

    /// `sigma_1` applied first, `sigma_q` last.
    pub fn product(&self) -> Perm {
        self.sigmas
            .iter()
            .fold(perm::identity(self.n), |acc, s| perm::compose(&acc, s))
    }

    pub fn cycle_types(&self) -> Vec<Vec<usize>> {
        self.sigmas.iter().map(|s| perm::cycle_type(s)).collect()
    }

    /// Same constellation with sheets renamed by `pi`.
    pub fn conjugated(&self, pi: &[usize]) -> Self {
        let inv = perm::inverse(pi);
        Constellation {
            n: self.n,
            q: self.q,
            sigmas: self
                .sigmas
                .iter()
                .map(|s| perm::compose(&perm::compose(&inv, s), pi))
                .collect(),
        }
    }

    /// Whether `other` equals this constellation after renaming sheets.
    pub fn equivalent(&self, other: &Constellation) -> bool {
        self.n == other.n
            && self.q == other.q
            && perm::simultaneous_conjugator(&self.sigmas, &other.sigmas).is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstellationVerdict {
    pub valid: bool,
    pub product_is_identity: bool,
    pub transitive: bool,
    /// Human-readable counterexample when invalid.
    pub witness: Option<String>,
}

pub fn validate_constellation(c: &Constellation) -> ConstellationVerdict {
    let prod = c.product();
    let product_is_identity = perm::is_identity(&prod);
    let transitive = perm::transitive(c.n, &c.sigmas);
    let witness = if !product_is_identity {
        let x = prod.iter().enumerate().find(|(i, &y)| *i != y).unwrap();
        Some(format!("product maps sheet {} to {}", x.0 + 1, x.1 + 1))
    } else if !transitive {
        Some("sheet 1 does not reach every sheet".to_string())
    } else {
        None
    };
    ConstellationVerdict { valid: product_is_identity && transitive, product_is_identity, transitive, witness }
}

/// `g` with `2g - 2 = -2n + sum over all cycles of (length - 1)`.
pub fn genus_from_constellation(c: &Constellation) -> Result<usize> {
    let s: usize = c
        .sigmas
        .iter()
        .map(|p| perm::cycles(p).iter().map(|cy| cy.len() - 1).sum::<usize>())
        .sum();
    let two_g = s as i64 - 2 * c.n as i64 + 2;
    if two_g < 0 || two_g % 2 != 0 {
        return Err(Error::InconsistentRamification(format!("cycle data gives 2g = {}", two_g)));
    }
    Ok((two_g / 2) as usize)
}

/// Sheet number of each blue face (`None` for gray faces).
pub fn blue_face_index(m: &CombinatorialMap) -> Vec<Option<usize>> {
    let mut idx = vec![None; m.face_count()];
    for (k, f) in m.blue_faces().into_iter().enumerate() {
        idx[f] = Some(k);
    }
    idx
}

/// `sigma_j` sends each blue face to the next blue face counterclockwise around its
/// vertex labelled `j`.
pub fn constellation_from_rmap(m: &CombinatorialMap) -> Result<Constellation> {
    let l = m
        .labelling()
        .ok_or_else(|| Error::InconsistentMap("map carries no labels".into()))?;
    let q = l.q;
    let verdict = check_consistent(m, l);
    if !verdict.consistent {
        return Err(Error::InconsistentMap(verdict.violations.join("; ")));
    }
    if let Some(f) = m.blue_faces().into_iter().find(|&f| m.faces()[f].len() != q) {
        return Err(Error::InconsistentMap(format!("blue face {} is not a {}-gon", f, q)));
    }
    let n = m.degree();
    let idx = blue_face_index(m);
    let mut sigmas = vec![vec![usize::MAX; n]; q];
    for v in 0..m.vertex_count() {
        let j = l.labels[v] - 1;
        let around: Vec<usize> = m
            .rotation(v)
            .iter()
            .filter_map(|&h| idx[m.face_of(h)])
            .collect();
        for (k, &a) in around.iter().enumerate() {
            let b = around[(k + 1) % around.len()];
            if sigmas[j][a] != usize::MAX {
                return Err(Error::InconsistentMap(format!(
                    "blue face {} meets label {} twice",
                    a + 1,
                    j + 1
                )));
            }
            sigmas[j][a] = b;
        }
    }
    if let Some(j) = sigmas.iter().position(|s| s.contains(&usize::MAX)) {
        return Err(Error::InconsistentMap(format!("some blue face misses label {}", j + 1)));
    }
    Constellation::new(n, sigmas)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tile {
    Blue(usize),
    Gray(usize),
}

/// Blue tile `blue`'s edge `edge` is glued to gray tile `gray`'s edge `edge`.
/// Edge `e` joins polygon vertices labelled `e` and `e + 1 (mod q)`; all 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub edge: usize,
    pub blue: usize,
    pub gray: usize,
}

/// A vertex of the glued surface with cone angle `2 pi * multiple`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePoint {
    pub label: usize,
    pub multiple: usize,
    /// Tile corners meeting here; the corner index is the polygon vertex label.
    pub corners: Vec<Tile>,
}

/// The covering surface as `2n` polygon tiles glued edge to edge.
#[derive(Clone, Debug, PartialEq)]
pub struct SurgeryPlan {
    pub n: usize,
    pub q: usize,
    /// Polygon vertex positions, vertex `k` labelled `k + 1`; they stand for the
    /// free critical-value parameters and are not determined by the tiling.
    pub polygon: Vec<SpherePoint<f64>>,
    pub gluings: Vec<Gluing>,
    pub cone_points: Vec<ConePoint>,
}

impl SurgeryPlan {
    /// Euler characteristic of the glued surface.
    pub fn euler_characteristic(&self) -> i64 {
        self.cone_points.len() as i64 - self.gluings.len() as i64 + 2 * self.n as i64
    }

    /// Rebuilds the labelled R-map from the gluing pairs alone.
    pub fn to_rmap(&self) -> Result<CombinatorialMap> {
        let (n, q) = (self.n, self.q);
        // gray[e][alpha]: gray tile across edge e (0-based) from blue alpha
        let mut gray = vec![vec![usize::MAX; n]; q];
        for g in &self.gluings {
            if g.edge == 0 || g.edge > q || g.blue == 0 || g.blue > n || g.gray == 0 || g.gray > n {
                return Err(Error::InvalidConstellation("gluing index out of range".into()));
            }
            gray[g.edge - 1][g.blue - 1] = g.gray - 1;
        }
        let mut gray_inv = Vec::with_capacity(q);
        for (e, row) in gray.iter().enumerate() {
            if !perm::is_permutation(row) {
                return Err(Error::InvalidConstellation(format!("edge {} is not glued bijectively", e + 1)));
            }
            gray_inv.push(perm::inverse(row));
        }
        let fwd = |e: usize, a: usize| 2 * (e * n + a);
        let h = 2 * n * q;
        let twin: Vec<usize> = (0..h).map(|x| x ^ 1).collect();
        let mut phi = vec![0; h];
        let mut labels_of_half = vec![0; h];
        for e in 0..q {
            let prev = (e + q - 1) % q;
            for a in 0..n {
                phi[fwd(e, a)] = fwd((e + 1) % q, a);
                let beta = gray[e][a];
                phi[fwd(e, a) + 1] = fwd(prev, gray_inv[prev][beta]) + 1;
                labels_of_half[fwd(e, a)] = e + 1;
                labels_of_half[fwd(e, a) + 1] = (e + 1) % q + 1;
            }
        }
        let m = CombinatorialMap::from_face_permutation(twin, &phi, 0)?;
        let labels: Vec<usize> = (0..m.vertex_count()).map(|v| labels_of_half[m.rotation(v)[0]]).collect();
        m.with_labelling(QLabelling { q, labels })
    }
}

/// Gluing data for a valid constellation: blue tile `alpha` meets gray tile
/// `G_e(alpha)` along edge `e`, where `G_q = id` and `G_e = G_(e-1) . sigma_e^-1`.
pub fn assemble_surface<T: Scalar>(c: &Constellation, polygon: &JordanPath<T>) -> Result<SurgeryPlan> {
    let verdict = validate_constellation(c);
    if !verdict.valid {
        return Err(Error::InvalidConstellation(verdict.witness.unwrap_or_default()));
    }
    if polygon.q() != c.q {
        return Err(Error::InvalidConstellation(format!(
            "polygon has {} vertices for {} permutations",
            polygon.q(),
            c.q
        )));
    }
    let (n, q) = (c.n, c.q);
    // g[e] for 0-based edge e between labels e+1 and e+2; g[q-1] is the identity
    let mut g: Vec<Perm> = Vec::with_capacity(q);
    let mut cur = perm::identity(n);
    for s in &c.sigmas {
        cur = perm::compose(&perm::inverse(s), &cur);
        g.push(cur.clone());
    }
    debug_assert!(perm::is_identity(&g[q - 1]));
    let mut gluings = Vec::with_capacity(n * q);
    for (e, ge) in g.iter().enumerate() {
        for a in 0..n {
            gluings.push(Gluing { edge: e + 1, blue: a + 1, gray: ge[a] + 1 });
        }
    }
    let mut cone_points = Vec::new();
    for (j, s) in c.sigmas.iter().enumerate() {
        // label j+1 sits between edge j-1 (incoming) and edge j (outgoing)
        let incoming = &g[(j + q - 1) % q];
        for cyc in perm::cycles(s) {
            let mut corners = Vec::with_capacity(2 * cyc.len());
            for &a in &cyc {
                corners.push(Tile::Blue(a + 1));
                corners.push(Tile::Gray(incoming[a] + 1));
            }
            cone_points.push(ConePoint { label: j + 1, multiple: cyc.len(), corners });
        }
    }
    Ok(SurgeryPlan {
        n,
        q,
        polygon: polygon.vertices().iter().map(|v| v.to_f64()).collect(),
        gluings,
        cone_points,
    })
}

/// The polygon with vertices `1, 2, ..., q - 1, inf` on the extended real line.
pub fn default_polygon(q: usize) -> Result<JordanPath<f64>> {
    let mut v: Vec<SpherePoint<f64>> = (1..q).map(|k| SpherePoint::real(k as f64)).collect();
    v.push(SpherePoint::Infinity);
    real_line_through(&v)
}

/// Labelled R-map of a valid constellation.
pub fn rmap_from_constellation(c: &Constellation) -> Result<CombinatorialMap> {
    assemble_surface(c, &default_polygon(c.q)?)?.to_rmap()
}

#[derive(Clone, Debug)]
pub struct Realization {
    pub rmap: CombinatorialMap,
    pub constellation: Constellation,
    pub genus: usize,
    pub plan: SurgeryPlan,
}

/// Subdivides a consistently labelled t-graph into an R-map and extracts its
/// constellation, genus and gluing description.
pub fn realize(m: &CombinatorialMap, l: &QLabelling) -> Result<Realization> {
    let verdict = check_consistent(m, l);
    if !verdict.consistent {
        return Err(Error::InconsistentLabelling(verdict.violations.join("; ")));
    }
    let labelled = m.clone().without_labelling().with_labelling(l.clone())?;
    let rmap = labelled.subdivide_edges(l.q)?;
    let constellation = constellation_from_rmap(&rmap)?;
    let verdict = validate_constellation(&constellation);
    if !verdict.valid {
        return Err(Error::InvalidConstellation(verdict.witness.unwrap_or_default()));
    }
    let genus = genus_from_constellation(&constellation)?;
    let euler = m.euler_genus()?;
    if genus != euler {
        return Err(Error::InconsistentMap(format!(
            "constellation genus {} differs from Euler genus {}",
            genus, euler
        )));
    }
    let plan = assemble_surface(&constellation, &default_polygon(l.q)?)?;
    Ok(Realization { rmap, constellation, genus, plan })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Perm {
        let c: Vec<Vec<usize>> = cycles.iter().map(|c| c.iter().map(|x| x - 1).collect()).collect();
        perm::from_cycles(n, &c).unwrap()
    }

    #[test]
    fn validation_examples() {
        let ok = Constellation::new(2, vec![cyc(2, &[&[1, 2]]), cyc(2, &[&[1, 2]])]).unwrap();
        assert!(validate_constellation(&ok).valid);
        let bad = Constellation::new(3, vec![cyc(3, &[&[1, 2]]), cyc(3, &[&[1, 3]])]).unwrap();
        let v = validate_constellation(&bad);
        assert!(!v.product_is_identity && !v.valid);
        let split = Constellation::new(
            4,
            vec![cyc(4, &[&[1, 2]]), cyc(4, &[&[1, 2]]), cyc(4, &[&[3, 4]]), cyc(4, &[&[3, 4]])],
        )
        .unwrap();
        let v = validate_constellation(&split);
        assert!(v.product_is_identity && !v.transitive);
    }

    #[test]
    fn product_order_matters() {
        // sigma_3 closes the left-to-right product; the reversed product is a 3-cycle
        let s1 = cyc(3, &[&[1, 2]]);
        let s2 = cyc(3, &[&[2, 3]]);
        let s3 = perm::inverse(&perm::compose(&s1, &s2));
        let c = Constellation::new(3, vec![s1.clone(), s2.clone(), s3.clone()]).unwrap();
        assert!(perm::is_identity(&c.product()));
        let reversed = perm::compose(&perm::compose(&s3, &s2), &s1);
        assert!(!perm::is_identity(&reversed));
        assert_eq!(genus_from_constellation(&c).unwrap(), 0);
    }

    #[test]
    fn power_map_roundtrip() {
        for n in 2..=6 {
            let s: Perm = (0..n).map(|i| (i + 1) % n).collect();
            let c = Constellation::new(n, vec![s.clone(), perm::inverse(&s)]).unwrap();
            assert_eq!(genus_from_constellation(&c).unwrap(), 0);
            let plan = assemble_surface(&c, &default_polygon(2).unwrap()).unwrap();
            assert_eq!(plan.cone_points.len(), 2);
            assert!(plan.cone_points.iter().all(|p| p.multiple == n));
            assert_eq!(plan.euler_characteristic(), 2);
            let m = plan.to_rmap().unwrap();
            assert_eq!(m.face_count(), 2 * n);
            let back = constellation_from_rmap(&m).unwrap();
            assert!(back.equivalent(&c));
        }
    }

    #[test]
    fn belyi_cubic_cone_angles() {
        // cycle types (2,1), (2,1), (3)
        let s1 = cyc(3, &[&[1, 2]]);
        let s2 = cyc(3, &[&[2, 3]]);
        let s3 = perm::inverse(&perm::compose(&s1, &s2));
        let c = Constellation::new(3, vec![s1, s2, s3]).unwrap();
        assert_eq!(c.cycle_types(), vec![vec![2, 1], vec![2, 1], vec![3]]);
        let plan = assemble_surface(&c, &default_polygon(3).unwrap()).unwrap();
        let mut mult: Vec<usize> = plan.cone_points.iter().map(|p| p.multiple).collect();
        mult.sort();
        assert_eq!(mult, vec![1, 1, 2, 2, 3]);
        assert_eq!(plan.euler_characteristic(), 2);
        let m = plan.to_rmap().unwrap();
        assert_eq!(m.euler_genus().unwrap(), 0);
        assert!(constellation_from_rmap(&m).unwrap().equivalent(&c));
    }
}
