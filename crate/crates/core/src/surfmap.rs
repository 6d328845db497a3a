//! Oriented combinatorial maps as half-edge rotation systems.
//!
//! The face on the left of half-edge `h` continues with `rot_pred(twin(h))`, so
//! counterclockwise vertex rotations give counterclockwise face boundaries.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::labelling::QLabelling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceColor {
    Blue,
    Gray,
}

/// Half-edge rotation system with a derived face 2-colouring and optional labels.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinatorialMap {
    twin: Vec<usize>,
    origin: Vec<usize>,
    rotations: Vec<Vec<usize>>,
    blue_seed: usize,
    labelling: Option<QLabelling>,
    rot_pos: Vec<usize>,
    face_of: Vec<usize>,
    faces: Vec<Vec<usize>>,
    colors: Vec<FaceColor>,
}

impl CombinatorialMap {
    /// Validates the rotation system and colours faces so that the face on the left
    /// of `blue_seed` (half-edge 0 by default) is blue.
    pub fn new(twin: Vec<usize>, origin: Vec<usize>, rotations: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_seed(twin, origin, rotations, 0)
    }

    pub fn with_seed(
        twin: Vec<usize>,
        origin: Vec<usize>,
        rotations: Vec<Vec<usize>>,
        blue_seed: usize,
    ) -> Result<Self> {
        let h = twin.len();
        if h == 0 {
            return Err(Error::MalformedMap("no half-edges".into()));
        }
        if origin.len() != h {
            return Err(Error::MalformedMap("origin and twin lists differ in length".into()));
        }
        if blue_seed >= h {
            return Err(Error::MalformedMap(format!("blue face half-edge {} out of range", blue_seed)));
        }
        for (i, &t) in twin.iter().enumerate() {
            if t >= h || t == i || twin[t] != i {
                return Err(Error::MalformedMap(format!(
                    "twin is not a fixed-point-free involution at half-edge {}",
                    i
                )));
            }
        }
        let mut rot_pos = vec![usize::MAX; h];
        for (v, rot) in rotations.iter().enumerate() {
            if rot.is_empty() {
                return Err(Error::MalformedMap(format!("vertex {} has no half-edges", v)));
            }
            for (k, &e) in rot.iter().enumerate() {
                if e >= h {
                    return Err(Error::MalformedMap(format!("half-edge {} out of range", e)));
                }
                if rot_pos[e] != usize::MAX {
                    return Err(Error::MalformedMap(format!("half-edge {} appears twice in rotations", e)));
                }
                if origin[e] != v {
                    return Err(Error::MalformedMap(format!(
                        "half-edge {} listed at vertex {} but has origin {}",
                        e, v, origin[e]
                    )));
                }
                rot_pos[e] = k;
            }
        }
        if let Some(e) = rot_pos.iter().position(|&p| p == usize::MAX) {
            return Err(Error::MalformedMap(format!("half-edge {} missing from its origin's rotation", e)));
        }
        let mut m = CombinatorialMap {
            twin,
            origin,
            rotations,
            blue_seed,
            labelling: None,
            rot_pos,
            face_of: Vec::new(),
            faces: Vec::new(),
            colors: Vec::new(),
        };
        m.trace_faces();
        m.color_faces()?;
        Ok(m)
    }

    /// Builds a map from its twin involution and face permutation `phi`.
    /// Vertex rotations are the cycles of `phi . twin` read backwards.
    pub fn from_face_permutation(twin: Vec<usize>, phi: &[usize], blue_seed: usize) -> Result<Self> {
        let h = twin.len();
        if phi.len() != h || twin.iter().any(|&t| t >= h) {
            return Err(Error::MalformedMap("face permutation size mismatch".into()));
        }
        let rot_pred: Vec<usize> = (0..h).map(|x| phi[twin[x]]).collect();
        let mut seen = vec![false; h];
        let mut origin = vec![0; h];
        let mut rotations = Vec::new();
        for start in 0..h {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = rot_pred[x];
            }
            if x != start {
                return Err(Error::MalformedMap("face permutation is not a bijection".into()));
            }
            cyc[1..].reverse();
            for &e in &cyc {
                origin[e] = rotations.len();
            }
            rotations.push(cyc);
        }
        Self::with_seed(twin, origin, rotations, blue_seed)
    }

    fn trace_faces(&mut self) {
        let h = self.twin.len();
        self.face_of = vec![usize::MAX; h];
        self.faces.clear();
        for start in 0..h {
            if self.face_of[start] != usize::MAX {
                continue;
            }
            let f = self.faces.len();
            let mut cyc = Vec::new();
            let mut x = start;
            while self.face_of[x] == usize::MAX {
                self.face_of[x] = f;
                cyc.push(x);
                x = self.face_succ(x);
            }
            self.faces.push(cyc);
        }
    }

    fn color_faces(&mut self) -> Result<()> {
        let nf = self.faces.len();
        let mut color: Vec<Option<FaceColor>> = vec![None; nf];
        let mut starts: Vec<usize> = vec![self.face_of[self.blue_seed]];
        starts.extend(0..nf);
        for s in starts {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(FaceColor::Blue);
            let mut queue = VecDeque::from([s]);
            while let Some(f) = queue.pop_front() {
                let c = color[f].unwrap();
                let other = match c {
                    FaceColor::Blue => FaceColor::Gray,
                    FaceColor::Gray => FaceColor::Blue,
                };
                for &e in &self.faces[f] {
                    let g = self.face_of[self.twin[e]];
                    match color[g] {
                        None => {
                            color[g] = Some(other);
                            queue.push_back(g);
                        }
                        Some(cg) if cg == c => {
                            return Err(Error::MalformedMap(format!(
                                "face adjacency is not bipartite: faces {} and {} share an edge and a colour",
                                f, g
                            )));
                        }
                        _ => {}
                    }
                }
            }
        }
        self.colors = color.into_iter().map(|c| c.unwrap()).collect();
        let blue = self.colors.iter().filter(|&&c| c == FaceColor::Blue).count();
        if 2 * blue != nf {
            return Err(Error::MalformedMap(format!(
                "{} blue and {} gray faces are not balanced",
                blue,
                nf - blue
            )));
        }
        Ok(())
    }

    pub fn with_labelling(mut self, labelling: QLabelling) -> Result<Self> {
        if labelling.labels.len() != self.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "labelling has {} entries for {} vertices",
                labelling.labels.len(),
                self.vertex_count()
            )));
        }
        self.labelling = Some(labelling);
        Ok(self)
    }

    pub fn without_labelling(mut self) -> Self {
        self.labelling = None;
        self
    }

    pub fn labelling(&self) -> Option<&QLabelling> {
        self.labelling.as_ref()
    }

    pub fn label(&self, v: usize) -> Option<usize> {
        self.labelling.as_ref().map(|l| l.labels[v])
    }

    pub fn half_edge_count(&self) -> usize {
        self.twin.len()
    }

    pub fn edge_count(&self) -> usize {
        self.twin.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    /// Endpoint of `h`.
    pub fn target(&self, h: usize) -> usize {
        self.origin[self.twin[h]]
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotations
    }

    pub fn twins(&self) -> &[usize] {
        &self.twin
    }

    pub fn origins(&self) -> &[usize] {
        &self.origin
    }

    pub fn valence(&self, v: usize) -> usize {
        self.rotations[v].len()
    }

    /// Counterclockwise successor of `h` around its origin.
    pub fn rot_succ(&self, h: usize) -> usize {
        let rot = &self.rotations[self.origin[h]];
        rot[(self.rot_pos[h] + 1) % rot.len()]
    }

    pub fn rot_pred(&self, h: usize) -> usize {
        let rot = &self.rotations[self.origin[h]];
        rot[(self.rot_pos[h] + rot.len() - 1) % rot.len()]
    }

    /// Next half-edge along the face on the left of `h`.
    pub fn face_succ(&self, h: usize) -> usize {
        self.rot_pred(self.twin[h])
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Face on the left of `h`.
    pub fn face_of(&self, h: usize) -> usize {
        self.face_of[h]
    }

    pub fn face_color(&self, f: usize) -> FaceColor {
        self.colors[f]
    }

    pub fn blue_seed(&self) -> usize {
        self.blue_seed
    }

    /// True when the blue face lies on the left of `h`, i.e. `h` is oriented forward.
    pub fn is_forward(&self, h: usize) -> bool {
        self.colors[self.face_of[h]] == FaceColor::Blue
    }

    /// Blue faces in order of their smallest half-edge.
    pub fn blue_faces(&self) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.colors[f] == FaceColor::Blue).collect()
    }

    /// Number of blue faces, the degree `n`.
    pub fn degree(&self) -> usize {
        self.colors.iter().filter(|&&c| c == FaceColor::Blue).count()
    }

    /// Vertices along face `f`, one per boundary half-edge origin.
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&h| self.origin[h]).collect()
    }

    pub fn max_face_length(&self) -> usize {
        self.faces.iter().map(|f| f.len()).max().unwrap_or(0)
    }

    pub fn component_count(&self) -> usize {
        let nv = self.vertex_count();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for h in 0..self.twin.len() {
            let (a, b) = (find(&mut parent, self.origin[h]), find(&mut parent, self.target(h)));
            parent[a] = b;
        }
        (0..nv).filter(|&v| find(&mut parent, v) == v).count()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Genus from `V - E + F = 2 - 2g`.
    pub fn euler_genus(&self) -> Result<usize> {
        let c = self.component_count();
        if c != 1 {
            return Err(Error::Disconnected(c));
        }
        let chi = self.euler_characteristic();
        if chi % 2 != 0 {
            return Err(Error::OddEuler(chi));
        }
        if chi > 2 {
            return Err(Error::MalformedMap(format!("Euler characteristic {} exceeds 2", chi)));
        }
        Ok(((2 - chi) / 2) as usize)
    }

    pub fn classify(&self) -> Classification {
        let mut violations = Vec::new();
        let mut odd = false;
        let mut has_two = false;
        let mut has_big = false;
        for v in 0..self.vertex_count() {
            let d = self.valence(v);
            if !d.is_multiple_of(2) {
                odd = true;
                violations.push(format!("vertex {} has odd valence {}", v, d));
            } else if d == 2 {
                has_two = true;
            } else {
                has_big = true;
            }
        }
        let lengths: Vec<usize> = self.faces.iter().map(|f| f.len()).collect();
        let homogeneous = lengths.windows(2).all(|w| w[0] == w[1]);
        let tgraph = !odd && !has_two;
        if !odd && has_two {
            violations.push("valence-2 vertices present (not a t-graph)".into());
        }
        if !homogeneous {
            violations.push(format!(
                "faces are not homogeneous (lengths {}..={})",
                lengths.iter().min().unwrap_or(&0),
                lengths.iter().max().unwrap_or(&0)
            ));
        }
        if !has_big {
            violations.push("no vertex of valence at least 4".into());
        }
        let rmap = !odd && homogeneous && has_big;
        let kind = if rmap && has_two {
            MapKind::RMap
        } else if tgraph {
            MapKind::TGraph
        } else if rmap {
            MapKind::RMap
        } else {
            MapKind::Raw
        };
        Classification {
            kind,
            is_tgraph: tgraph,
            is_rmap: rmap,
            gonality: if homogeneous { lengths.first().copied() } else { None },
            violations,
        }
    }

    /// Removes the given valence-2 vertices, merging their two edges into one.
    pub fn forget_vertices(&self, remove: &[bool]) -> Result<Self> {
        let h = self.half_edge_count();
        let mut twin = self.twin.clone();
        let mut dead = vec![false; h];
        for v in 0..self.vertex_count() {
            if !remove[v] {
                continue;
            }
            let rot = &self.rotations[v];
            if rot.len() != 2 {
                return Err(Error::WrongKind(format!("vertex {} has valence {}, not 2", v, rot.len())));
            }
            let (a, b) = (rot[0], rot[1]);
            let (x, y) = (twin[a], twin[b]);
            if x == b {
                return Err(Error::MalformedMap(format!("vertex {} carries a loop", v)));
            }
            twin[x] = y;
            twin[y] = x;
            dead[a] = true;
            dead[b] = true;
        }
        // renumber survivors
        let mut new_id = vec![usize::MAX; h];
        let mut next = 0;
        for e in 0..h {
            if !dead[e] {
                new_id[e] = next;
                next += 1;
            }
        }
        let mut vmap = vec![usize::MAX; self.vertex_count()];
        let mut rotations = Vec::new();
        let mut kept_labels = Vec::new();
        for v in 0..self.vertex_count() {
            if remove[v] {
                continue;
            }
            vmap[v] = rotations.len();
            rotations.push(self.rotations[v].iter().map(|&e| new_id[e]).collect::<Vec<_>>());
            if let Some(l) = &self.labelling {
                kept_labels.push(l.labels[v]);
            }
        }
        let mut new_twin = vec![0; next];
        let mut new_origin = vec![0; next];
        for e in 0..h {
            if dead[e] {
                continue;
            }
            new_twin[new_id[e]] = new_id[twin[e]];
            new_origin[new_id[e]] = vmap[self.origin[e]];
        }
        let seed = (0..h)
            .find(|&e| !dead[e] && self.is_forward(e))
            .map(|e| new_id[e])
            .ok_or_else(|| Error::MalformedMap("no surviving half-edge".into()))?;
        let mut m = Self::with_seed(new_twin, new_origin, rotations, seed)?;
        if let Some(l) = &self.labelling {
            m.labelling = Some(QLabelling { q: l.q, labels: kept_labels });
        }
        Ok(m)
    }

    /// Drops every valence-2 vertex; faces and colours are preserved.
    pub fn forget_valence2(&self) -> Result<Self> {
        let remove: Vec<bool> = (0..self.vertex_count()).map(|v| self.valence(v) == 2).collect();
        if !remove.iter().any(|&r| r) {
            return Ok(self.clone());
        }
        self.forget_vertices(&remove)
    }

    /// Inserts `nu` valence-2 vertices on each edge whose forward endpoint labels
    /// differ by `nu + 1` in `Z_q`, labelled consecutively.
    pub fn subdivide_edges(&self, q: usize) -> Result<Self> {
        let lab = self
            .labelling
            .as_ref()
            .ok_or_else(|| Error::InconsistentLabelling("map carries no labels".into()))?;
        if lab.q != q {
            return Err(Error::InconsistentLabelling(format!("labelling is over Z_{}, not Z_{}", lab.q, q)));
        }
        let h = self.half_edge_count();
        let mut twin = self.twin.clone();
        let mut origin = self.origin.clone();
        let mut rotations = self.rotations.clone();
        let mut labels = lab.labels.clone();
        for e in 0..h {
            if !self.is_forward(e) {
                continue;
            }
            let (u, v) = (self.origin[e], self.target(e));
            let d = (labels[v] + q - labels[u]) % q;
            if d == 0 {
                return Err(Error::InconsistentLabelling(format!(
                    "edge {}->{} has equal endpoint labels {}",
                    u, v, labels[u]
                )));
            }
            let te = self.twin[e];
            let mut last_forward = e;
            for i in 1..d {
                let w = rotations.len();
                labels.push((labels[u] - 1 + i) % q + 1);
                // the previous node's forward half-edge now ends at w
                let back = twin.len();
                let fwd = back + 1;
                twin.push(usize::MAX);
                twin.push(usize::MAX);
                origin.push(w);
                origin.push(w);
                twin[last_forward] = back;
                twin[back] = last_forward;
                rotations.push(vec![back, fwd]);
                last_forward = fwd;
            }
            twin[last_forward] = te;
            twin[te] = last_forward;
        }
        let mut m = Self::with_seed(twin, origin, rotations, self.blue_seed)?;
        m.labelling = Some(QLabelling { q, labels });
        Ok(m)
    }

    /// Image of the map under the half-edge bijection `perm` (old id -> new id),
    /// with vertices renumbered by first appearance.
    pub fn relabelled(&self, perm: &[usize]) -> Result<Self> {
        let h = self.half_edge_count();
        let mut inv = vec![0; h];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let twin: Vec<usize> = (0..h).map(|n| perm[self.twin[inv[n]]]).collect();
        let rotations: Vec<Vec<usize>> = self
            .rotations
            .iter()
            .map(|r| r.iter().map(|&e| perm[e]).collect())
            .collect();
        let origin: Vec<usize> = (0..h).map(|n| self.origin[inv[n]]).collect();
        let mut m = Self::with_seed(twin, origin, rotations, perm[self.blue_seed])?;
        m.labelling = self.labelling.clone();
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    TGraph,
    RMap,
    Raw,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub kind: MapKind,
    pub is_tgraph: bool,
    pub is_rmap: bool,
    pub gonality: Option<usize>,
    pub violations: Vec<String>,
}

/// Orientation- and colour-preserving isomorphism from `a` to `b`, returned as the
/// half-edge bijection. With `respect_labels`, labels must agree up to a global shift.
pub fn map_isomorphic(a: &CombinatorialMap, b: &CombinatorialMap, respect_labels: bool) -> Option<Vec<usize>> {
    if a.half_edge_count() != b.half_edge_count()
        || a.vertex_count() != b.vertex_count()
        || a.face_count() != b.face_count()
    {
        return None;
    }
    if respect_labels {
        match (a.labelling(), b.labelling()) {
            (Some(x), Some(y)) if x.q == y.q => {}
            (None, None) => {}
            _ => return None,
        }
    }
    let mut sig_a: Vec<usize> = (0..a.vertex_count()).map(|v| a.valence(v)).collect();
    let mut sig_b: Vec<usize> = (0..b.vertex_count()).map(|v| b.valence(v)).collect();
    sig_a.sort_unstable();
    sig_b.sort_unstable();
    if sig_a != sig_b {
        return None;
    }
    // anchor the half-edge 0 of each component of a
    (0..b.half_edge_count()).find_map(|target| extend_isomorphism(a, b, 0, target, respect_labels))
}

/// All orientation- and colour-preserving automorphisms, as half-edge permutations.
pub fn automorphisms(m: &CombinatorialMap) -> Vec<Vec<usize>> {
    (0..m.half_edge_count())
        .filter_map(|t| extend_isomorphism(m, m, 0, t, false))
        .collect()
}

fn extend_isomorphism(
    a: &CombinatorialMap,
    b: &CombinatorialMap,
    anchor: usize,
    target: usize,
    respect_labels: bool,
) -> Option<Vec<usize>> {
    let h = a.half_edge_count();
    let mut map = vec![usize::MAX; h];
    let mut used = vec![false; h];
    let shift = if respect_labels {
        match (a.labelling(), b.labelling()) {
            (Some(la), Some(lb)) => {
                let q = la.q;
                Some((lb.labels[b.origin(target)] + q - la.labels[a.origin(anchor)]) % q)
            }
            _ => None,
        }
    } else {
        None
    };
    let mut stack = vec![(anchor, target)];
    while let Some((x, y)) = stack.pop() {
        if map[x] != usize::MAX {
            if map[x] != y {
                return None;
            }
            continue;
        }
        if used[y] {
            return None;
        }
        if a.is_forward(x) != b.is_forward(y) || a.valence(a.origin(x)) != b.valence(b.origin(y)) {
            return None;
        }
        if let Some(s) = shift {
            let (la, lb) = (a.labelling().unwrap(), b.labelling().unwrap());
            if (la.labels[a.origin(x)] + s - 1) % la.q + 1 != lb.labels[b.origin(y)] {
                return None;
            }
        }
        map[x] = y;
        used[y] = true;
        stack.push((a.twin(x), b.twin(y)));
        stack.push((a.rot_succ(x), b.rot_succ(y)));
    }
    if map.contains(&usize::MAX) {
        // a has more than one component; only connected maps are compared
        return None;
    }
    Some(map)
}

/// Vertex permutation induced by a half-edge isomorphism.
pub fn vertex_map(a: &CombinatorialMap, b: &CombinatorialMap, half_edges: &[usize]) -> Vec<usize> {
    (0..a.vertex_count())
        .map(|v| b.origin(half_edges[a.rotation(v)[0]]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two vertices joined by `k` parallel edges; on the sphere this has `k` bigon faces.
    pub(crate) fn bigon(k: usize) -> CombinatorialMap {
        // half-edge 2i leaves vertex 0, 2i+1 leaves vertex 1
        let twin: Vec<usize> = (0..2 * k).map(|e| e ^ 1).collect();
        let origin: Vec<usize> = (0..2 * k).map(|e| e % 2).collect();
        let r0: Vec<usize> = (0..k).map(|i| 2 * i).collect();
        let r1: Vec<usize> = (0..k).rev().map(|i| 2 * i + 1).collect();
        CombinatorialMap::new(twin, origin, vec![r0, r1]).unwrap()
    }

    /// Independent face count by brute-force permutation cycles.
    fn brute_faces(m: &CombinatorialMap) -> usize {
        let h = m.half_edge_count();
        let mut seen = vec![false; h];
        let mut count = 0;
        for s in 0..h {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                let t = m.twin(x);
                let v = m.origin(t);
                let rot = m.rotation(v);
                let i = rot.iter().position(|&e| e == t).unwrap();
                x = rot[(i + rot.len() - 1) % rot.len()];
            }
        }
        count
    }

    #[test]
    fn theta_and_bigon_faces() {
        // the theta graph is a bigon map with odd valence; only structure is checked
        let twin: Vec<usize> = (0..6).map(|e| e ^ 1).collect();
        let origin: Vec<usize> = (0..6).map(|e| e % 2).collect();
        let err = CombinatorialMap::new(twin, origin, vec![vec![0, 2, 4], vec![5, 3, 1]]);
        // three faces cannot be 2-coloured with balance
        assert!(matches!(err, Err(Error::MalformedMap(_))));
        for k in [2, 4, 6, 8] {
            let m = bigon(k);
            assert_eq!(m.face_count(), k);
            assert_eq!(brute_faces(&m), k);
            assert_eq!(m.euler_genus().unwrap(), 0);
            assert!(m.faces().iter().all(|f| f.len() == 2));
        }
    }

    #[test]
    fn classification() {
        let m = bigon(6);
        let c = m.classify();
        assert!(c.is_tgraph && c.is_rmap);
        assert_eq!(c.gonality, Some(2));
        assert_eq!(m.forget_valence2().unwrap(), m);
    }

    #[test]
    fn from_face_permutation_roundtrip() {
        let m = bigon(4);
        let phi: Vec<usize> = (0..m.half_edge_count()).map(|h| m.face_succ(h)).collect();
        let r = CombinatorialMap::from_face_permutation(m.twins().to_vec(), &phi, 0).unwrap();
        assert!(map_isomorphic(&m, &r, false).is_some());
        assert_eq!(r.face_count(), 4);
    }

    #[test]
    fn subdivide_and_forget() {
        let m = bigon(4).with_labelling(QLabelling::new(4, vec![1, 3])).unwrap();
        let s = m.subdivide_edges(4).unwrap();
        // forward edges 1 -> 3 gain one vertex labelled 2, backward ones 3 -> 1 gain 4
        assert_eq!(s.vertex_count(), 2 + 4);
        assert!(s.faces().iter().all(|f| f.len() == 4));
        let mut new_labels: Vec<usize> = s.labelling().unwrap().labels[2..].to_vec();
        new_labels.sort();
        assert_eq!(new_labels, vec![2, 2, 4, 4]);
        let back = s.forget_valence2().unwrap();
        assert!(map_isomorphic(&back, &m, true).is_some());
        assert_eq!(back.labelling().unwrap().labels, vec![1, 3]);
        let bad = bigon(4).with_labelling(QLabelling::new(4, vec![2, 2])).unwrap();
        assert!(matches!(bad.subdivide_edges(4), Err(Error::InconsistentLabelling(_))));
    }

    #[test]
    fn isomorphism_with_shift() {
        let m = bigon(4).with_labelling(QLabelling::new(2, vec![1, 2])).unwrap();
        let shifted = bigon(4).with_labelling(QLabelling::new(2, vec![2, 1])).unwrap();
        assert!(map_isomorphic(&m, &shifted, true).is_some());
        let w = map_isomorphic(&m, &m, true).unwrap();
        assert_eq!(automorphisms(&m).len(), 4);
        assert!(w.iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn relabelled_is_isomorphic() {
        let m = bigon(4);
        let h = m.half_edge_count();
        let perm: Vec<usize> = (0..h).map(|i| (i + 3) % h).collect();
        let r = m.relabelled(&perm).unwrap();
        assert!(map_isomorphic(&m, &r, false).is_some());
    }
}
