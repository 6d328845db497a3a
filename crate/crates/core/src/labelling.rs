//! Consistent q-labellings of t-graphs and R-maps.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::surfmap::{automorphisms, vertex_map, CombinatorialMap};

/// Vertex labels in `Z_q`, stored as representatives `1..=q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QLabelling {
    pub q: usize,
    pub labels: Vec<usize>,
}

impl QLabelling {
    /// Normalizes arbitrary integer labels into `1..=q` (so `0` becomes `q`).
    pub fn new(q: usize, labels: Vec<usize>) -> Self {
        assert!(q >= 1, "q must be positive");
        let labels = labels.into_iter().map(|v| (v + q - 1) % q + 1).collect();
        QLabelling { q, labels }
    }

    pub fn from_signed(q: usize, labels: &[i64]) -> Self {
        let qi = q as i64;
        QLabelling {
            q,
            labels: labels.iter().map(|&v| ((v - 1).rem_euclid(qi) + 1) as usize).collect(),
        }
    }

    /// Global shift by `c` in `Z_q`.
    pub fn shifted(&self, c: usize) -> Self {
        QLabelling {
            q: self.q,
            labels: self.labels.iter().map(|&l| (l - 1 + c) % self.q + 1).collect(),
        }
    }

    /// Representative of the shift orbit with the smallest label vector.
    pub fn canonical(&self) -> Self {
        (0..self.q).map(|c| self.shifted(c)).min().unwrap()
    }

    /// Labels pulled back along a vertex bijection: `result[v] = self[perm[v]]`.
    pub fn pulled_back(&self, perm: &[usize]) -> Self {
        QLabelling {
            q: self.q,
            labels: perm.iter().map(|&w| self.labels[w]).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// t-graph form: labels increase cyclically around each blue tile, some hidden.
    Hidden,
    /// R-map form: every label exactly once per blue tile, consecutive.
    Full,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub consistent: bool,
    pub mode: CheckMode,
    pub violations: Vec<String>,
}

/// Differences `L(v_{k+1}) - L(v_k) mod q` read counterclockwise around a face.
fn face_steps(m: &CombinatorialMap, f: usize, l: &QLabelling) -> Vec<usize> {
    let vs = m.face_vertices(f);
    let k = vs.len();
    (0..k)
        .map(|i| (l.labels[vs[(i + 1) % k]] + l.q - l.labels[vs[i]]) % l.q)
        .collect()
}

/// Checks both conditions of a consistent labelling. Maps with valence-2 vertices
/// are checked in [`CheckMode::Full`], others in [`CheckMode::Hidden`].
pub fn check_consistent(m: &CombinatorialMap, l: &QLabelling) -> Verdict {
    let has_two = (0..m.vertex_count()).any(|v| m.valence(v) == 2);
    let mode = if has_two { CheckMode::Full } else { CheckMode::Hidden };
    let mut violations = Vec::new();
    if l.labels.len() != m.vertex_count() {
        violations.push(format!("{} labels for {} vertices", l.labels.len(), m.vertex_count()));
        return Verdict { consistent: false, mode, violations };
    }
    for f in m.blue_faces() {
        let steps = face_steps(m, f, l);
        let total: usize = steps.iter().sum();
        let ok = match mode {
            CheckMode::Hidden => steps.iter().all(|&d| d >= 1) && total == l.q,
            CheckMode::Full => steps.len() == l.q && steps.iter().all(|&d| d == 1),
        };
        if !ok {
            let labels: Vec<usize> = m.face_vertices(f).iter().map(|&v| l.labels[v]).collect();
            violations.push(format!(
                "condition (i) fails on blue face {}: labels {:?} are not a cyclic run of Z_{}",
                f, labels, l.q
            ));
        }
    }
    let mut attained = vec![false; l.q + 1];
    for v in 0..m.vertex_count() {
        if m.valence(v) >= 4 {
            attained[l.labels[v]] = true;
        }
    }
    for j in 1..=l.q {
        if !attained[j] {
            violations.push(format!("condition (ii) fails: label {} is not attained at a vertex of valence >= 4", j));
        }
    }
    Verdict { consistent: violations.is_empty(), mode, violations }
}

/// `[max(2 + 2g, max face length), min(2n + 2g - 2, #vertices of valence >= 4)]`.
pub fn admissible_q_range(m: &CombinatorialMap) -> Result<(usize, usize)> {
    if !m.classify().is_tgraph {
        return Err(Error::WrongKind("admissible range needs a t-graph".into()));
    }
    let g = m.euler_genus()?;
    let n = m.degree();
    let lower = (2 + 2 * g).max(m.max_face_length());
    let big = (0..m.vertex_count()).filter(|&v| m.valence(v) >= 4).count();
    let upper = (2 * n + 2 * g).saturating_sub(2).min(big);
    if lower > upper {
        return Err(Error::EmptyRange { lower: lower as i64, upper: upper as i64 });
    }
    Ok((lower, upper))
}

struct Search<'a> {
    q: usize,
    order: Vec<usize>,
    /// Per vertex, the blue faces (as vertex cycles) it lies on.
    faces_at: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
    big: &'a [bool],
    labels: Vec<usize>,
    out: Vec<QLabelling>,
}

impl Search<'_> {
    /// Partial condition (i): between consecutive assigned positions `k` steps apart
    /// the label difference is at least `k`, and the differences add up to `q`.
    fn face_ok(&self, f: usize) -> bool {
        let vs = &self.faces[f];
        let len = vs.len();
        let assigned: Vec<usize> = (0..len).filter(|&i| self.labels[vs[i]] != 0).collect();
        if assigned.len() < 2 {
            return true;
        }
        let mut total = 0;
        for (k, &i) in assigned.iter().enumerate() {
            let j = assigned[(k + 1) % assigned.len()];
            let gap = (j + len - i) % len;
            let gap = if gap == 0 { len } else { gap };
            let d = (self.labels[vs[j]] + self.q - self.labels[vs[i]]) % self.q;
            if d < gap {
                return false;
            }
            total += d;
        }
        total == self.q
    }

    fn run(&mut self, depth: usize) {
        if depth == self.order.len() {
            let mut seen = vec![false; self.q + 1];
            for (v, &l) in self.labels.iter().enumerate() {
                if self.big[v] {
                    seen[l] = true;
                }
            }
            if seen[1..].iter().all(|&s| s) {
                self.out.push(QLabelling { q: self.q, labels: self.labels.clone() });
            }
            return;
        }
        let v = self.order[depth];
        let choices: Vec<usize> = if self.labels[v] != 0 { vec![self.labels[v]] } else { (1..=self.q).collect() };
        let fixed = self.labels[v] != 0;
        for c in choices {
            self.labels[v] = c;
            if self.faces_at[v].iter().all(|&f| self.face_ok(f)) {
                self.run(depth + 1);
            }
        }
        if !fixed {
            self.labels[v] = 0;
        }
    }
}

/// All consistent `q`-labellings of a t-graph (or R-map), found by backtracking over
/// vertices in breadth-first order of blue faces. With `canonical`, vertex 0 is pinned
/// to label 1, which picks the lexicographically smallest member of each shift orbit.
pub fn enumerate_labellings(m: &CombinatorialMap, q: usize, canonical: bool) -> Vec<QLabelling> {
    let blue = m.blue_faces();
    let faces: Vec<Vec<usize>> = blue.iter().map(|&f| m.face_vertices(f)).collect();
    if q < 2 || faces.iter().any(|f| f.len() > q) {
        return Vec::new();
    }
    let has_two = (0..m.vertex_count()).any(|v| m.valence(v) == 2);
    if has_two && faces.iter().any(|f| f.len() != q) {
        return Vec::new();
    }
    let nv = m.vertex_count();
    let mut faces_at = vec![Vec::new(); nv];
    for (i, f) in faces.iter().enumerate() {
        for &v in f {
            if !faces_at[v].contains(&i) {
                faces_at[v].push(i);
            }
        }
    }
    // vertex order: BFS over blue faces starting from one containing vertex 0
    let mut order = Vec::with_capacity(nv);
    let mut placed = vec![false; nv];
    let mut face_done = vec![false; faces.len()];
    let mut queue: VecDeque<usize> = faces_at[0].iter().copied().take(1).collect();
    if let Some(&f) = queue.front() {
        face_done[f] = true;
    }
    placed[0] = true;
    order.push(0);
    while let Some(f) = queue.pop_front() {
        for &v in &faces[f] {
            if !placed[v] {
                placed[v] = true;
                order.push(v);
            }
            for &g in &faces_at[v] {
                if !face_done[g] {
                    face_done[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }
    order.extend((0..nv).filter(|&v| !placed[v]));
    let big: Vec<bool> = (0..nv).map(|v| m.valence(v) >= 4).collect();
    let mut labels = vec![0; nv];
    if canonical {
        labels[0] = 1;
    }
    let mut s = Search { q, order, faces_at, faces, big: &big, labels, out: Vec::new() };
    s.run(0);
    let mut out = s.out;
    out.sort();
    out
}

/// Orbit counts of a set of labellings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCounts {
    /// Labellings up to global shift.
    pub shift_orbits: usize,
    /// Labellings up to global shift and colour-preserving map automorphism.
    pub automorphism_orbits: usize,
}

/// Representative of a labelling modulo shifts and map automorphisms.
pub fn automorphism_canonical(m: &CombinatorialMap, l: &QLabelling, auts: &[Vec<usize>]) -> QLabelling {
    auts.iter()
        .map(|a| l.pulled_back(&vertex_map(m, m, a)).canonical())
        .min()
        .unwrap_or_else(|| l.canonical())
}

pub fn orbit_counts(m: &CombinatorialMap, labellings: &[QLabelling]) -> OrbitCounts {
    let auts = automorphisms(m);
    let shift: BTreeSet<QLabelling> = labellings.iter().map(|l| l.canonical()).collect();
    let aut: BTreeSet<QLabelling> = labellings.iter().map(|l| automorphism_canonical(m, l, &auts)).collect();
    OrbitCounts { shift_orbits: shift.len(), automorphism_orbits: aut.len() }
}

/// Forgets the valence-2 vertices carrying residues that never occur at a vertex of
/// valence at least 4, then renumbers the surviving residues order-preservingly.
pub fn prune_fake_values(m: &CombinatorialMap) -> Result<(CombinatorialMap, Vec<usize>)> {
    let l = m
        .labelling()
        .ok_or_else(|| Error::InconsistentLabelling("map carries no labels".into()))?;
    let q = l.q;
    let mut real = vec![false; q + 1];
    for v in 0..m.vertex_count() {
        if m.valence(v) >= 4 {
            real[l.labels[v]] = true;
        }
    }
    let fake: Vec<usize> = (1..=q).filter(|&j| !real[j]).collect();
    if fake.is_empty() {
        return Ok((m.clone(), fake));
    }
    let remove: Vec<bool> = (0..m.vertex_count()).map(|v| !real[l.labels[v]]).collect();
    let pruned = m.forget_vertices(&remove)?;
    let mut renumber = vec![0; q + 1];
    let mut next = 0;
    for j in 1..=q {
        if real[j] {
            next += 1;
            renumber[j] = next;
        }
    }
    let old = pruned.labelling().unwrap().labels.clone();
    let relabelled = QLabelling { q: next, labels: old.iter().map(|&j| renumber[j]).collect() };
    let pruned = pruned.without_labelling().with_labelling(relabelled)?;
    Ok((pruned, fake))
}
