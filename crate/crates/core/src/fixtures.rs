//! Reference functions, maps and constellations used by tests and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io;
use crate::labelling::QLabelling;
use crate::monodromy::{rmap_from_constellation, Constellation};
use crate::numfield::{Polynomial, RationalFunction};
use crate::perm;
use crate::scalar::Cx;
use crate::surfmap::{CombinatorialMap, FaceColor};

/// `z (z^2 - 1)(z^2 - 4) / (z - 3)`: degree 5 with six real critical values.
pub fn example_function() -> RationalFunction<f64> {
    let num = Polynomial::from_real(&[0.0, 4.0, 0.0, -5.0, 0.0, 1.0]);
    let den = Polynomial::from_real(&[-3.0, 1.0]);
    RationalFunction::new(num, den).expect("coprime")
}

/// `z^n`.
pub fn power_function(n: usize) -> RationalFunction<f64> {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    RationalFunction::polynomial(Polynomial::from_real(&c)).expect("degree at least 2")
}

/// `z^2 (3 - 2z)`, critical values 0, 1 and infinity.
pub fn belyi_cubic() -> RationalFunction<f64> {
    RationalFunction::polynomial(Polynomial::from_real(&[0.0, 0.0, 3.0, -2.0])).expect("cubic")
}

/// A random rational function of the given degree: numerator and denominator of
/// full degree with real and imaginary parts of every coefficient uniform in `[-1, 1]`.
pub fn random_function(rng: &mut impl Rng, degree: usize) -> RationalFunction<f64> {
    loop {
        let mut coeffs = || -> Polynomial<f64> {
            Polynomial::new(
                (0..=degree)
                    .map(|_| Cx::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                    .collect(),
            )
        };
        let (num, den) = (coeffs(), coeffs());
        if let Ok(f) = RationalFunction::new(num, den) {
            if f.degree() == degree {
                return f;
            }
        }
    }
}

/// `count` random functions of degree 3 to 6 from a seeded generator.
pub fn random_functions(seed: u64, count: usize) -> Vec<RationalFunction<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(3..=6);
            random_function(&mut rng, d)
        })
        .collect()
}

/// Square-tiled surface on `cells` unit cells: `right[c]` and `up[c]` are the
/// neighbours of cell `c`, `blue[c]` its colour. Corners are labelled so every
/// blue cell reads `1, 2, 3, 4` counterclockwise from its lower-left corner.
pub fn square_tiled(right: &[usize], up: &[usize], blue: &[bool]) -> Result<CombinatorialMap> {
    let n = right.len();
    if up.len() != n || blue.len() != n || !perm::is_permutation(right) || !perm::is_permutation(up) {
        return Err(Error::InvalidInput("cell neighbours must be permutations".into()));
    }
    // per cell: bottom edge eastward, its twin, left edge northward, its twin
    let bottom = |c: usize| 4 * c;
    let left = |c: usize| 4 * c + 2;
    let twin: Vec<usize> = (0..4 * n).map(|h| h ^ 1).collect();
    let mut phi = vec![0; 4 * n];
    for c in 0..n {
        phi[bottom(c)] = left(right[c]);
        phi[left(right[c])] = bottom(up[c]) + 1;
        phi[bottom(up[c]) + 1] = left(c) + 1;
        phi[left(c) + 1] = bottom(c);
    }
    let seed = (0..n).find(|&c| blue[c]).ok_or_else(|| Error::InvalidInput("no blue cell".into()))?;
    let m = CombinatorialMap::from_face_permutation(twin, &phi, bottom(seed))?;
    // labels step up along blue faces and down along gray ones
    let mut labels = vec![usize::MAX; m.vertex_count()];
    labels[m.origin(bottom(seed))] = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for f in 0..m.face_count() {
            let step = if m.face_color(f) == FaceColor::Blue { 1 } else { 3 };
            for &h in &m.faces()[f] {
                let (a, b) = (m.origin(h), m.target(h));
                if labels[a] != usize::MAX {
                    let want = (labels[a] + step) % 4;
                    if labels[b] == usize::MAX {
                        labels[b] = want;
                        changed = true;
                    } else if labels[b] != want {
                        return Err(Error::InvalidInput("cells admit no 4-labelling".into()));
                    }
                }
            }
        }
    }
    if labels.contains(&usize::MAX) {
        return Err(Error::InvalidInput("disconnected cells".into()));
    }
    let labels = labels.into_iter().map(|l| l + 1).collect();
    m.with_labelling(QLabelling::new(4, labels))
}

/// Chessboard on the torus cut into a `2k x 2k` grid.
pub fn torus_chessboard(k: usize) -> CombinatorialMap {
    let w = 2 * k.max(1);
    let id = |x: usize, y: usize| (y % w) * w + x % w;
    let mut right = vec![0; w * w];
    let mut up = vec![0; w * w];
    let mut blue = vec![false; w * w];
    for y in 0..w {
        for x in 0..w {
            right[id(x, y)] = id(x + 1, y);
            up[id(x, y)] = id(x, y + 1);
            blue[id(x, y)] = (x + y) % 2 == 0;
        }
    }
    square_tiled(&right, &up, &blue).expect("grid")
}

/// Genus-2 chessboard on the L-shaped table of three unit squares `A | B` with
/// `C` on top of `A`, each square cut into four cells; degree 6, nine valence-4
/// vertices and one of valence 12.
pub fn l_chessboard() -> CombinatorialMap {
    // squares A = 0 at (0, 0), B = 1 at (1, 0), C = 2 at (0, 1)
    let next_right = [1, 0, 2];
    let next_up = [2, 1, 0];
    let origin = [(0, 0), (1, 0), (0, 1)];
    let cell = |s: usize, a: usize, b: usize| 4 * s + 2 * b + a;
    let mut right = vec![0; 12];
    let mut up = vec![0; 12];
    let mut blue = vec![false; 12];
    for s in 0..3 {
        for b in 0..2 {
            for a in 0..2 {
                let c = cell(s, a, b);
                right[c] = if a == 0 { cell(s, 1, b) } else { cell(next_right[s], 0, b) };
                up[c] = if b == 0 { cell(s, a, 1) } else { cell(next_up[s], a, 0) };
                blue[c] = (2 * origin[s].0 + a + 2 * origin[s].1 + b) % 2 == 0;
            }
        }
    }
    square_tiled(&right, &up, &blue).expect("L-shaped table")
}

fn constellation(n: usize, cycles: &[Vec<Vec<usize>>]) -> Constellation {
    Constellation::from_cycles(n, cycles).expect("fixture constellation")
}

/// `z^n`: an `n`-cycle over 0 and its inverse over infinity.
pub fn bigon_constellation(n: usize) -> Constellation {
    let fwd: Vec<usize> = (1..=n).collect();
    let back: Vec<usize> = (1..=n).rev().collect();
    constellation(n, &[vec![fwd], vec![back]])
}

pub fn bigon(n: usize) -> CombinatorialMap {
    rmap_from_constellation(&bigon_constellation(n)).expect("bigon")
}

/// `z^2 (3 - 2z)` over `0, 1, inf`.
pub fn belyi_constellation() -> Constellation {
    constellation(3, &[vec![vec![1, 2]], vec![vec![2, 3]], vec![vec![1, 2, 3]]])
}

pub fn belyi_map() -> CombinatorialMap {
    rmap_from_constellation(&belyi_constellation()).expect("belyi")
}

/// Degree 2 over six values, every permutation the transposition: four hexagons
/// meeting at six valence-4 vertices on a surface of genus 2.
pub fn hyperelliptic_constellation() -> Constellation {
    constellation(2, &vec![vec![vec![1, 2]]; 6])
}

pub fn hyperelliptic_map() -> CombinatorialMap {
    rmap_from_constellation(&hyperelliptic_constellation()).expect("hyperelliptic")
}

/// The traced 6-labelled R-map of [`example_function`] over the real line.
pub fn example_rmap() -> CombinatorialMap {
    let v = io::parse(include_str!("../fixtures/example_rmap.json")).expect("fixture JSON");
    io::map_from_json(&v).expect("fixture map")
}

/// The t-graph of [`example_function`]: [`example_rmap`] without its valence-2
/// vertices and without labels.
pub fn example_tgraph() -> CombinatorialMap {
    let v = io::parse(include_str!("../fixtures/example_tgraph.json")).expect("fixture JSON");
    io::map_from_json(&v).expect("fixture map")
}

/// A degree-4 R-map of gonality 6 whose residue 5 sits only on valence-2
/// vertices: a 5-labelled genus-0 map with label 5 renamed 6 and a fresh vertex
/// labelled 5 on every edge from 4 to 6.
pub fn fake_value_map() -> CombinatorialMap {
    let c = constellation(
        4,
        &[vec![vec![1, 2]], vec![vec![2, 3]], vec![vec![3, 4]], vec![vec![1, 2]], vec![vec![1, 3, 4]]],
    );
    let m = rmap_from_constellation(&c).expect("genus-0 constellation");
    let l = m.labelling().unwrap();
    let renamed: Vec<usize> = l.labels.iter().map(|&x| if x == 5 { 6 } else { x }).collect();
    m.clone()
        .with_labelling(QLabelling::new(6, renamed))
        .and_then(|m| m.subdivide_edges(6))
        .expect("subdivision")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labelling::{admissible_q_range, check_consistent, enumerate_labellings, orbit_counts, prune_fake_values};
    use crate::monodromy::{constellation_from_rmap, genus_from_constellation};

    #[test]
    fn chessboards() {
        let t = torus_chessboard(1);
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (4, 8, 4));
        assert_eq!(t.euler_genus().unwrap(), 1);
        assert!(check_consistent(&t, t.labelling().unwrap()).consistent);
        let c = constellation_from_rmap(&t).unwrap();
        assert!(c.cycle_types().iter().all(|ct| ct == &vec![2]));
        let l = l_chessboard();
        assert_eq!((l.vertex_count(), l.edge_count(), l.face_count()), (10, 24, 12));
        assert_eq!(l.euler_genus().unwrap(), 2);
        assert_eq!(l.degree(), 6);
        let mut val: Vec<usize> = (0..10).map(|v| l.valence(v)).collect();
        val.sort();
        assert_eq!(val, [vec![4; 9], vec![12]].concat());
        assert!(check_consistent(&l, l.labelling().unwrap()).consistent);
        assert_eq!(genus_from_constellation(&constellation_from_rmap(&l).unwrap()).unwrap(), 2);
    }

    #[test]
    fn hyperelliptic() {
        let m = hyperelliptic_map();
        assert_eq!((m.vertex_count(), m.face_count()), (6, 4));
        assert!((0..6).all(|v| m.valence(v) == 4));
        assert_eq!(m.euler_genus().unwrap(), 2);
    }

    #[test]
    fn example_maps() {
        let r = example_rmap();
        assert_eq!((r.vertex_count(), r.edge_count(), r.face_count()), (22, 30, 10));
        let t = example_tgraph();
        assert_eq!(t.vertex_count(), 6);
        assert!(t.classify().is_tgraph);
        assert_eq!(admissible_q_range(&t).unwrap(), (4, 6));
        assert!(enumerate_labellings(&t, 3, true).is_empty());
        assert!(enumerate_labellings(&t, 7, true).is_empty());
        for q in 4..=6 {
            assert!(!enumerate_labellings(&t, q, true).is_empty());
        }
        let five = enumerate_labellings(&t, 5, true);
        assert!(orbit_counts(&t, &five).automorphism_orbits >= 2);
    }

    #[test]
    fn frozen_map_matches_a_fresh_trace() {
        let f = example_function();
        let cd = crate::critical::critical_data(&f).unwrap();
        let g = crate::gamma::real_line_gamma(&cd).unwrap();
        let e = crate::trace::pullback_rmap(&f, &g).unwrap();
        assert!(crate::surfmap::map_isomorphic(&e.map, &example_rmap(), true).is_some());
    }

    #[test]
    fn fake_value() {
        let m = fake_value_map();
        assert_eq!(m.classify().gonality, Some(6));
        let (p, removed) = prune_fake_values(&m).unwrap();
        assert_eq!(removed, vec![5]);
        assert_eq!(p.classify().gonality, Some(5));
        assert!(check_consistent(&p, p.labelling().unwrap()).consistent);
        let (again, none) = prune_fake_values(&p).unwrap();
        assert!(none.is_empty());
        assert_eq!(again, p);
    }
}
