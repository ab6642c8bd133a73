//! Avoiding walks via product-digraph search, and corner triples with their
//! walk certificates.

use std::collections::BTreeMap;

use crate::gadgets::GadgetError;
use crate::graph::{check_incomparable, Graph};

/// A walk in the target graph: consecutive vertices are adjacent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<usize>,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn reversed(&self) -> Walk {
        let mut v = self.vertices.clone();
        v.reverse();
        Walk { vertices: v }
    }

    pub fn verify(&self, h: &Graph) -> bool {
        !self.vertices.is_empty()
            && self.vertices.windows(2).all(|w| h.has_edge(w[0], w[1]))
    }
}

/// `p` avoids `q`: equal lengths, distinct starts, and no step edge from
/// `p[i]` to `q[i+1]`.
pub fn avoids(h: &Graph, p: &Walk, q: &Walk) -> bool {
    p.vertices.len() == q.vertices.len()
        && p.start() != q.start()
        && (0..p.vertices.len() - 1).all(|i| !h.has_edge(p.vertices[i], q.vertices[i + 1]))
}

/// Finds equal-length walks `w_r: starts[r] -> ends[r]` such that for every
/// ordered pair `(i, j)` in `avoid`, walk `i` avoids walk `j`. The product
/// search explores vertex tuples breadth-first, so the certificate has
/// minimum length and ties resolve to the lexicographically first transition
/// order.
pub fn find_avoiding_walks(
    h: &Graph,
    starts: &[usize],
    ends: &[usize],
    avoid: &[(usize, usize)],
    max_len: usize,
) -> Option<Vec<Walk>> {
    assert_eq!(starts.len(), ends.len());
    let r = starts.len();
    for &(i, j) in avoid {
        if starts[i] == starts[j] {
            return None; // avoidance requires distinct first vertices
        }
    }
    let n = h.n();
    let encode = |tuple: &[usize]| -> usize {
        tuple.iter().fold(0usize, |acc, &v| acc * n + v)
    };
    let start_code = encode(starts);
    let goal_code = encode(ends);
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    parent.insert(start_code, usize::MAX);
    let mut frontier = vec![start_code];
    // Length-zero certificates are useless for path gadgets, so the goal is
    // only tested from depth one onward.
    let mut depth = 0usize;
    while !frontier.is_empty() && depth < max_len {
        depth += 1;
        let mut next_frontier = Vec::new();
        for &code in &frontier {
            let tuple = decode(code, r, n);
            let mut next = vec![0usize; r];
            // The goal may coincide with an already-visited state (walks can
            // return to their starts), so it is detected before the visited
            // check and reconstructed through the predecessor's chain.
            if step(h, &tuple, avoid, 0, &mut next, &mut |cand: &[usize]| {
                let c = encode(cand);
                if c == goal_code {
                    return true;
                }
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(c) {
                    e.insert(code);
                    next_frontier.push(c);
                }
                false
            }) {
                let mut codes = vec![goal_code, code];
                while *codes.last().unwrap() != start_code {
                    codes.push(parent[codes.last().unwrap()]);
                }
                codes.reverse();
                let walks: Vec<Walk> = (0..r)
                    .map(|i| Walk {
                        vertices: codes.iter().map(|&c| decode(c, r, n)[i]).collect(),
                    })
                    .collect();
                debug_assert!(walks.iter().all(|w| w.verify(h)));
                debug_assert!(avoid.iter().all(|&(i, j)| avoids(h, &walks[i], &walks[j])));
                return Some(walks);
            }
        }
        frontier = next_frontier;
    }
    None
}

fn decode(code: usize, r: usize, n: usize) -> Vec<usize> {
    let mut tuple = vec![0usize; r];
    let mut c = code;
    for i in (0..r).rev() {
        tuple[i] = c % n;
        c /= n;
    }
    tuple
}

/// Enumerates product transitions in lexicographic order, calling `emit` for
/// each; stops early when `emit` returns true.
fn step(
    h: &Graph,
    tuple: &[usize],
    avoid: &[(usize, usize)],
    pos: usize,
    next: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if pos == tuple.len() {
        let ok = avoid.iter().all(|&(i, j)| !h.has_edge(tuple[i], next[j]));
        return ok && emit(next);
    }
    for &w in h.neighbors(tuple[pos]) {
        next[pos] = w;
        if step(h, tuple, avoid, pos + 1, next, emit) {
            return true;
        }
    }
    false
}

/// Which structural case certifies the corner triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleCase {
    /// Induced six-cycle `w1..w6` with `(alpha, beta, gamma) = (w1, w5, w3)`.
    C6 { w: [usize; 6] },
    /// Induced eight-cycle with the same labeling.
    C8 { w: [usize; 8] },
    /// `{alpha, beta, gamma}` is strongly incomparable; the private
    /// neighbors are in triple order.
    StronglyIncomparable { privates: [usize; 3] },
}

/// The corner triple: three pairwise incomparable vertices in one class with
/// a matching pair hanging off `alpha` and `beta`, together with machine
/// re-verifiable walk certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerTriple {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub alpha_prime: usize,
    pub beta_prime: usize,
    pub case: TripleCase,
    /// `(X, Y)` with `X: alpha -> beta` avoiding `Y: beta -> alpha`.
    pub forward_pair: (Walk, Walk),
    /// `(X', Y')` with `Y': beta -> alpha` avoiding `X': alpha -> beta`.
    pub backward_pair: (Walk, Walk),
    /// For the strongly incomparable case: per `c` in `{alpha, beta, gamma}`
    /// the mutually avoiding family `X_c: alpha -> a`, `Y_c: alpha -> b`,
    /// `Z_c: beta -> c` with `{a, b} = {alpha, beta, gamma} - {c}`.
    pub triple_walks: Option<BTreeMap<usize, [Walk; 3]>>,
}

impl CornerTriple {
    /// Re-verifies every certificate from the definitions.
    pub fn verify(&self, h: &Graph) -> bool {
        let matching_ok = h.has_edge(self.alpha, self.alpha_prime)
            && h.has_edge(self.beta, self.beta_prime)
            && self.alpha_prime != self.beta_prime
            && !h.has_edge(self.alpha, self.beta_prime)
            && !h.has_edge(self.beta, self.alpha_prime)
            && !h.has_edge(self.alpha_prime, self.beta_prime)
            && !h.has_edge(self.alpha, self.beta);
        if !matching_ok {
            return false;
        }
        if check_incomparable(h, &[self.alpha, self.beta, self.gamma], false).is_err() {
            return false;
        }
        let (x, y) = &self.forward_pair;
        let (xp, yp) = &self.backward_pair;
        let cond3 = x.verify(h)
            && y.verify(h)
            && xp.verify(h)
            && yp.verify(h)
            && x.start() == self.alpha
            && x.end() == self.beta
            && y.start() == self.beta
            && y.end() == self.alpha
            && xp.start() == self.alpha
            && xp.end() == self.beta
            && yp.start() == self.beta
            && yp.end() == self.alpha
            && avoids(h, x, y)
            && avoids(h, yp, xp);
        if !cond3 {
            return false;
        }
        match &self.case {
            TripleCase::C6 { w } => {
                is_induced_cycle(h, w)
                    && (self.alpha, self.beta, self.gamma) == (w[0], w[4], w[2])
            }
            TripleCase::C8 { w } => {
                is_induced_cycle(h, w)
                    && (self.alpha, self.beta, self.gamma) == (w[0], w[4], w[2])
            }
            TripleCase::StronglyIncomparable { privates } => {
                let set = [self.alpha, self.beta, self.gamma];
                let strong = set.iter().zip(privates).all(|(&u, &pu)| {
                    h.has_edge(u, pu) && set.iter().all(|&w| w == u || !h.has_edge(pu, w))
                });
                let walks_ok = match &self.triple_walks {
                    None => false,
                    Some(map) => set.iter().all(|&c| {
                        let Some([xc, yc, zc]) = map.get(&c) else {
                            return false;
                        };
                        let others: Vec<usize> =
                            set.iter().copied().filter(|&v| v != c).collect();
                        xc.start() == self.alpha
                            && yc.start() == self.alpha
                            && zc.start() == self.beta
                            && zc.end() == c
                            && others.contains(&xc.end())
                            && others.contains(&yc.end())
                            && xc.end() != yc.end()
                            && avoids(h, xc, zc)
                            && avoids(h, yc, zc)
                            && avoids(h, zc, xc)
                            && avoids(h, zc, yc)
                    }),
                };
                strong && walks_ok
            }
        }
    }
}

fn is_induced_cycle(h: &Graph, w: &[usize]) -> bool {
    let k = w.len();
    for i in 0..k {
        for j in i + 1..k {
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            if h.has_edge(w[i], w[j]) != adjacent {
                return false;
            }
        }
    }
    true
}

/// All induced cycles of exactly length `k`, each listed once: the anchor is
/// the cycle minimum and the orientation with the smaller second vertex is
/// kept.
pub fn induced_cycles_of_length(h: &Graph, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn extend(h: &Graph, path: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        let anchor = path[0];
        if path.len() == k {
            if h.has_edge(last, anchor) && path[1] < path[k - 1] {
                debug_assert!(is_induced_cycle(h, path));
                out.push(path.clone());
            }
            return;
        }
        for &w in h.neighbors(last) {
            if w <= anchor || path.contains(&w) || h.has_loop(w) {
                continue;
            }
            // Keep the grown path induced: w touches only its predecessor,
            // except that the closing vertex may also touch the anchor.
            let closing_next = path.len() + 1 == k;
            let chord = path.iter().any(|&x| {
                x != last && h.has_edge(x, w) && !(closing_next && x == anchor)
            });
            if !chord {
                path.push(w);
                extend(h, path, k, out);
                path.pop();
            }
        }
    }
    for v in 0..h.n() {
        if h.has_loop(v) {
            continue;
        }
        let mut path = vec![v];
        extend(h, &mut path, k, &mut out);
    }
    out
}

const WALK_SEARCH_CAP: usize = 4096;

fn cond3_walks(h: &Graph, alpha: usize, beta: usize) -> Option<((Walk, Walk), (Walk, Walk))> {
    let fwd = find_avoiding_walks(h, &[alpha, beta], &[beta, alpha], &[(0, 1)], WALK_SEARCH_CAP)?;
    let bwd = find_avoiding_walks(h, &[alpha, beta], &[beta, alpha], &[(1, 0)], WALK_SEARCH_CAP)?;
    Some((
        (fwd[0].clone(), fwd[1].clone()),
        (bwd[0].clone(), bwd[1].clone()),
    ))
}

fn triple_walk_family(
    h: &Graph,
    alpha: usize,
    beta: usize,
    gamma: usize,
) -> Option<BTreeMap<usize, [Walk; 3]>> {
    let set = [alpha, beta, gamma];
    let mut map = BTreeMap::new();
    for &c in &set {
        let others: Vec<usize> = set.iter().copied().filter(|&v| v != c).collect();
        let (a, b) = (others[0], others[1]);
        let walks = find_avoiding_walks(
            h,
            &[alpha, alpha, beta],
            &[a, b, c],
            &[(0, 2), (1, 2), (2, 0), (2, 1)],
            WALK_SEARCH_CAP,
        )?;
        map.insert(c, [walks[0].clone(), walks[1].clone(), walks[2].clone()]);
    }
    Some(map)
}

fn matching_pair(h: &Graph, alpha: usize, beta: usize) -> Option<(usize, usize)> {
    for &ap in h.neighbors(alpha) {
        if h.has_edge(ap, beta) {
            continue;
        }
        for &bp in h.neighbors(beta) {
            if ap == bp || h.has_edge(bp, alpha) || h.has_edge(ap, bp) {
                continue;
            }
            return Some((ap, bp));
        }
    }
    None
}

fn finish_triple(
    h: &Graph,
    alpha: usize,
    beta: usize,
    gamma: usize,
    case: TripleCase,
) -> Option<CornerTriple> {
    if h.has_edge(alpha, beta)
        || check_incomparable(h, &[alpha, beta, gamma], false).is_err()
    {
        return None;
    }
    let (alpha_prime, beta_prime) = matching_pair(h, alpha, beta)?;
    let (forward_pair, backward_pair) = cond3_walks(h, alpha, beta)?;
    let triple_walks = match case {
        TripleCase::StronglyIncomparable { .. } => {
            Some(triple_walk_family(h, alpha, beta, gamma)?)
        }
        _ => None,
    };
    let t = CornerTriple {
        alpha,
        beta,
        gamma,
        alpha_prime,
        beta_prime,
        case,
        forward_pair,
        backward_pair,
        triple_walks,
    };
    t.verify(h).then_some(t)
}

/// Finds a corner triple of `h`, preferring the induced six-cycle case, then
/// the eight-cycle, then a strongly incomparable triple with the full walk
/// family. The caller guarantees `h` is connected, bipartite, undecomposable
/// and not the complement of a circular-arc graph; absence of a triple then
/// contradicts those preconditions and errors loudly.
pub fn find_corner_triple(h: &Graph) -> Result<CornerTriple, GadgetError> {
    // Case (a): induced C6 with (alpha, beta, gamma) = (w1, w5, w3).
    for cyc in induced_cycles_of_length(h, 6) {
        for rot in rotations(&cyc) {
            let w: [usize; 6] = rot.clone().try_into().unwrap();
            if let Some(t) = finish_triple(h, w[0], w[4], w[2], TripleCase::C6 { w }) {
                return Ok(t);
            }
        }
    }
    // Case (b): induced C8.
    for cyc in induced_cycles_of_length(h, 8) {
        for rot in rotations(&cyc) {
            let w: [usize; 8] = rot.clone().try_into().unwrap();
            if let Some(t) = finish_triple(h, w[0], w[4], w[2], TripleCase::C8 { w }) {
                return Ok(t);
            }
        }
    }
    // Case (c): strongly incomparable triples within one class.
    if let Ok(bip) = h.bipartition() {
        for class in [&bip.class_x, &bip.class_y] {
            for &alpha in class {
                for &beta in class {
                    for &gamma in class {
                        if alpha == beta || alpha == gamma || beta == gamma {
                            continue;
                        }
                        let Ok(w) = check_incomparable(h, &[alpha, beta, gamma], true) else {
                            continue;
                        };
                        let sorted = w.set.clone();
                        let privs = w.private_neighbors.unwrap();
                        let pick = |v: usize| {
                            privs[sorted.iter().position(|&x| x == v).unwrap()]
                        };
                        let case = TripleCase::StronglyIncomparable {
                            privates: [pick(alpha), pick(beta), pick(gamma)],
                        };
                        if let Some(t) = finish_triple(h, alpha, beta, gamma, case) {
                            return Ok(t);
                        }
                    }
                }
            }
        }
    }
    Err(GadgetError::NoTriple)
}

/// Finds a corner triple whose class contains the given vertex.
pub fn find_corner_triple_in_class_of(
    h: &Graph,
    anchor: usize,
) -> Result<CornerTriple, GadgetError> {
    let bip = h
        .bipartition()
        .map_err(|_| GadgetError::PreconditionViolated("target must be bipartite".into()))?;
    let t = find_corner_triple(h)?;
    if bip.side_of(t.alpha) == bip.side_of(anchor) {
        return Ok(t);
    }
    // The lemma holds for either class; rerun restricted by filtering
    // candidate triples on the anchored side.
    find_corner_triple_on_side(h, bip.side_of(anchor)).ok_or(GadgetError::NoTriple)
}

fn find_corner_triple_on_side(h: &Graph, side: u8) -> Option<CornerTriple> {
    let bip = h.bipartition().ok()?;
    for cyc in induced_cycles_of_length(h, 6) {
        for rot in rotations(&cyc) {
            if bip.side_of(rot[0]) != side {
                continue;
            }
            let w: [usize; 6] = rot.clone().try_into().unwrap();
            if let Some(t) = finish_triple(h, w[0], w[4], w[2], TripleCase::C6 { w }) {
                return Some(t);
            }
        }
    }
    for cyc in induced_cycles_of_length(h, 8) {
        for rot in rotations(&cyc) {
            if bip.side_of(rot[0]) != side {
                continue;
            }
            let w: [usize; 8] = rot.clone().try_into().unwrap();
            if let Some(t) = finish_triple(h, w[0], w[4], w[2], TripleCase::C8 { w }) {
                return Some(t);
            }
        }
    }
    let class = bip.class(side).to_vec();
    for &alpha in &class {
        for &beta in &class {
            for &gamma in &class {
                if alpha == beta || alpha == gamma || beta == gamma {
                    continue;
                }
                let Ok(w) = check_incomparable(h, &[alpha, beta, gamma], true) else {
                    continue;
                };
                let sorted = w.set.clone();
                let privs = w.private_neighbors.unwrap();
                let pick = |v: usize| privs[sorted.iter().position(|&x| x == v).unwrap()];
                let case = TripleCase::StronglyIncomparable {
                    privates: [pick(alpha), pick(beta), pick(gamma)],
                };
                if let Some(t) = finish_triple(h, alpha, beta, gamma, case) {
                    return Some(t);
                }
            }
        }
    }
    None
}

fn rotations(cycle: &[usize]) -> Vec<Vec<usize>> {
    let k = cycle.len();
    let mut out = Vec::with_capacity(2 * k);
    for start in 0..k {
        let fwd: Vec<usize> = (0..k).map(|i| cycle[(start + i) % k]).collect();
        let bwd: Vec<usize> = (0..k).map(|i| cycle[(start + k - i) % k]).collect();
        out.push(fwd);
        out.push(bwd);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{crown, cycle};

    #[test]
    fn reversal_flips_avoidance() {
        let h = cycle(6);
        let walks =
            find_avoiding_walks(&h, &[0, 4], &[4, 0], &[(0, 1)], 4096).expect("walks exist");
        assert!(avoids(&h, &walks[0], &walks[1]));
        assert!(avoids(&h, &walks[1].reversed(), &walks[0].reversed()));
    }

    #[test]
    fn avoiding_pair_in_c6() {
        // X: w1 -> w5 avoiding Y: w5 -> w1 (indices 0 and 4).
        let h = cycle(6);
        let walks = find_avoiding_walks(&h, &[0, 4], &[4, 0], &[(0, 1)], 4096).unwrap();
        assert_eq!(walks[0].start(), 0);
        assert_eq!(walks[0].end(), 4);
        assert_eq!(walks[0].len() % 2, 0);
        for i in 0..walks[0].vertices.len() - 1 {
            assert!(!h.has_edge(walks[0].vertices[i], walks[1].vertices[i + 1]));
        }
    }

    #[test]
    fn disconnected_endpoints_have_no_walks() {
        let h = crate::graph::Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert!(find_avoiding_walks(&h, &[0, 1], &[2, 3], &[], 64).is_none());
    }

    #[test]
    fn induced_cycle_enumeration_on_c6() {
        let cycles = induced_cycles_of_length(&cycle(6), 6);
        assert_eq!(cycles.len(), 1);
        assert!(induced_cycles_of_length(&cycle(6), 8).is_empty());
    }

    #[test]
    fn corner_triple_of_c6() {
        let h = cycle(6);
        let t = find_corner_triple(&h).unwrap();
        assert!(matches!(t.case, TripleCase::C6 { .. }));
        assert_eq!((t.alpha, t.beta, t.gamma), (0, 4, 2));
        assert!(t.verify(&h));
    }

    #[test]
    fn corner_triple_of_c8() {
        let h = cycle(8);
        let t = find_corner_triple(&h).unwrap();
        assert!(matches!(t.case, TripleCase::C8 { .. }));
        assert_eq!((t.alpha, t.beta, t.gamma), (0, 4, 2));
        assert!(t.verify(&h));
    }

    #[test]
    fn corner_triple_of_crown_is_c6_case() {
        // K_{3,3} minus a perfect matching is isomorphic to C6.
        let h = crown(3);
        let t = find_corner_triple(&h).unwrap();
        assert!(matches!(t.case, TripleCase::C6 { .. }));
        assert!(t.verify(&h));
    }

    #[test]
    fn corner_triple_of_long_even_cycle_is_strong_case() {
        let h = cycle(10);
        let t = find_corner_triple(&h).unwrap();
        assert!(matches!(t.case, TripleCase::StronglyIncomparable { .. }));
        assert!(t.verify(&h));
        assert!(t.triple_walks.is_some());
    }
}
