//! Small permutation utilities on `0..n`.

/// A permutation as its image vector: `p[i]` is the image of `i`.
pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// `then . first`: apply `first`, then `then`.
pub fn compose(first: &[usize], then: &[usize]) -> Perm {
    first.iter().map(|&x| then[x]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Disjoint cycles, each starting at its smallest element, ordered by that element.
pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p[x];
        }
        out.push(c);
    }
    out
}

/// Cycle lengths in decreasing order.
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut t: Vec<usize> = cycles(p).iter().map(|c| c.len()).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Option<Perm> {
    let mut p = identity(n);
    let mut seen = vec![false; n];
    for c in cycles {
        for (k, &x) in c.iter().enumerate() {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return None;
            }
            p[x] = c[(k + 1) % c.len()];
        }
    }
    Some(p)
}

/// Parity: true for odd permutations.
pub fn is_odd(p: &[usize]) -> bool {
    cycles(p).iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 1
}

/// Whether the group generated by `gens` acts transitively on `0..n`.
pub fn transitive(n: usize, gens: &[Perm]) -> bool {
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g[x];
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

/// A permutation `pi` with `pi . a_j = b_j . pi` for all `j` (so `b_j = pi a_j pi^-1`),
/// assuming the generated group is transitive.
pub fn simultaneous_conjugator(a: &[Perm], b: &[Perm]) -> Option<Perm> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.first().map_or(0, |p| p.len());
    if b.iter().chain(a.iter()).any(|p| p.len() != n) {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    'start: for x in 0..n {
        let mut pi = vec![usize::MAX; n];
        let mut used = vec![false; n];
        pi[0] = x;
        used[x] = true;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for (ga, gb) in a.iter().zip(b) {
                let (src, dst) = (ga[i], gb[pi[i]]);
                if pi[src] == usize::MAX {
                    if used[dst] {
                        continue 'start;
                    }
                    pi[src] = dst;
                    used[dst] = true;
                    stack.push(src);
                } else if pi[src] != dst {
                    continue 'start;
                }
            }
        }
        if pi.iter().all(|&y| y != usize::MAX) {
            return Some(pi);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let p = from_cycles(4, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(p, vec![1, 2, 0, 3]);
        assert_eq!(cycle_type(&p), vec![3, 1]);
        assert!(is_identity(&compose(&p, &inverse(&p))));
        assert!(!is_odd(&p));
        assert!(is_odd(&[1, 0]));
        assert!(!transitive(4, std::slice::from_ref(&p)));
        assert!(transitive(3, &[vec![1, 2, 0]]));
    }

    #[test]
    fn conjugation() {
        let a = vec![vec![1, 0, 2], vec![0, 2, 1]];
        let pi = vec![2, 0, 1];
        let b: Vec<Perm> = a
            .iter()
            .map(|g| compose(&compose(&inverse(&pi), g), &pi))
            .collect();
        let found = simultaneous_conjugator(&a, &b).unwrap();
        for (ga, gb) in a.iter().zip(&b) {
            assert_eq!(compose(ga, &found), compose(&found, gb));
        }
        let c = vec![vec![1, 0, 2], vec![1, 0, 2]];
        assert!(simultaneous_conjugator(&a, &c).is_none());
    }
}
