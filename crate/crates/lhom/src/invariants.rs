//! Target-graph invariants: bipartite decompositions, the circular-arc
//! complement oracle, the base invariants i/mim/gamma, and their starred
//! versions maximized over qualifying induced subgraphs.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{associated_bipartite, check_incomparable, Graph};

pub const DEFAULT_CA_CAP: usize = 14;
const CA_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    /// The circular-arc oracle could not decide a relevant subgraph and the
    /// undecided subgraphs could change the answer.
    #[error("undecidable: {0}")]
    Unknown(String),
}

// ---------------------------------------------------------------------------
// Bipartite decomposition
// ---------------------------------------------------------------------------

/// A partition `(D, N, R)` certifying that a connected bipartite graph is
/// decomposable: `N` is a nonempty separating biclique, `D` holds at least
/// two vertices of one class, and `D`'s class sides are completely joined to
/// the opposite sides of `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteDecomposition {
    pub d_set: BTreeSet<usize>,
    pub n_set: BTreeSet<usize>,
    pub r_set: BTreeSet<usize>,
}

impl BipartiteDecomposition {
    /// Re-verifies all four conditions against `h`.
    pub fn verify(&self, h: &Graph) -> bool {
        let bip = match h.bipartition() {
            Ok(b) => b,
            Err(_) => return false,
        };
        let n_vertices = h.n();
        let total = self.d_set.len() + self.n_set.len() + self.r_set.len();
        if total != n_vertices || self.n_set.is_empty() {
            return false;
        }
        for v in 0..n_vertices {
            let c = [&self.d_set, &self.n_set, &self.r_set]
                .iter()
                .filter(|s| s.contains(&v))
                .count();
            if c != 1 {
                return false;
            }
        }
        // (1) N separates D and R.
        for &u in &self.d_set {
            for &v in &self.r_set {
                if h.has_edge(u, v) {
                    return false;
                }
            }
        }
        // (2) two D-vertices in one class.
        let dx = self.d_set.iter().filter(|&&v| bip.side_of(v) == 0).count();
        let dy = self.d_set.len() - dx;
        if dx < 2 && dy < 2 {
            return false;
        }
        // (3) N induces a biclique.
        for &u in &self.n_set {
            for &v in &self.n_set {
                if u < v && bip.side_of(u) != bip.side_of(v) && !h.has_edge(u, v) {
                    return false;
                }
            }
        }
        // (4) (D∩X) ∪ (N∩Y) and (D∩Y) ∪ (N∩X) induce bicliques.
        for side in [0u8, 1] {
            for &d in self.d_set.iter().filter(|&&v| bip.side_of(v) == side) {
                for &n in self.n_set.iter().filter(|&&v| bip.side_of(v) != side) {
                    if !h.has_edge(d, n) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Searches for a bipartite decomposition of a connected bipartite graph.
/// Candidate separators are enumerated as bicliques (one class side first,
/// common neighbors of it second); components of `H - N` eligible for `D`
/// are those completely joined to the opposite sides of `N`. First found
/// wins, so the result is deterministic.
pub fn find_bipartite_decomposition(h: &Graph) -> Option<BipartiteDecomposition> {
    let bip = h.bipartition().ok()?;
    let n = h.n();
    if n < 3 {
        return None;
    }
    let xs = &bip.class_x;
    let ys = &bip.class_y;
    // Enumerate N = A ∪ B with A ⊆ X, B ⊆ Y, complete between A and B.
    // A and B may not both be empty.
    let mut candidates: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
    for amask in 0u64..(1 << xs.len()) {
        let a: BTreeSet<usize> = xs
            .iter()
            .enumerate()
            .filter(|(i, _)| amask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        // B must lie inside the common neighborhood of A.
        let common: Vec<usize> = ys
            .iter()
            .copied()
            .filter(|&y| a.iter().all(|&x| h.has_edge(x, y)))
            .collect();
        for bmask in 0u64..(1 << common.len()) {
            let b: BTreeSet<usize> = common
                .iter()
                .enumerate()
                .filter(|(i, _)| bmask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            if a.is_empty() && b.is_empty() {
                continue;
            }
            candidates.push((a.clone(), b));
        }
    }
    candidates.sort_by_key(|(a, b)| {
        let mut key: Vec<usize> = vec![a.len() + b.len()];
        key.extend(a.iter().chain(b.iter()));
        key
    });
    candidates.dedup();

    for (a, b) in candidates {
        let n_set: BTreeSet<usize> = a.union(&b).copied().collect();
        let rest: Vec<usize> = (0..n).filter(|v| !n_set.contains(v)).collect();
        if rest.is_empty() {
            continue;
        }
        let (sub, map) = h.induced(&rest);
        let mut d_set: BTreeSet<usize> = BTreeSet::new();
        for comp in sub.connected_components() {
            let verts: Vec<usize> = comp.iter().map(|&c| map[c]).collect();
            // Eligible for D: every component vertex joined to all N-vertices
            // of the opposite class.
            let ok = verts.iter().all(|&v| {
                n_set
                    .iter()
                    .filter(|&&w| bip.side_of(w) != bip.side_of(v))
                    .all(|&w| h.has_edge(v, w))
            });
            if ok {
                d_set.extend(verts);
            }
        }
        let dx = d_set.iter().filter(|&&v| bip.side_of(v) == 0).count();
        let dy = d_set.len() - dx;
        if dx >= 2 || dy >= 2 {
            let r_set: BTreeSet<usize> =
                (0..n).filter(|v| !n_set.contains(v) && !d_set.contains(v)).collect();
            let cand = BipartiteDecomposition { d_set, n_set, r_set };
            debug_assert!(cand.verify(h));
            return Some(cand);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Circular-arc complement oracle
// ---------------------------------------------------------------------------

/// Answer of the circular-arc complement oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircularArcAnswer {
    /// The complement admits a circular-arc model: per vertex the clockwise
    /// (start, end) positions among `2n` circle points.
    Yes(Vec<(usize, usize)>),
    /// Not the complement of a circular-arc graph; when the fast path fired,
    /// the witness is an induced cycle of length at least six.
    No(Option<Vec<usize>>),
    /// Size cap or search budget exceeded.
    Unknown(String),
}

/// Finds an induced cycle of length at least `min_len`, if any. Grows
/// induced paths anchored at the cycle minimum; a grown vertex touching the
/// anchor closes a candidate cycle and is never extended through.
pub fn find_long_induced_cycle(h: &Graph, min_len: usize) -> Option<Vec<usize>> {
    fn extend(h: &Graph, path: &mut Vec<usize>, min_len: usize) -> Option<Vec<usize>> {
        let last = *path.last().unwrap();
        let anchor = path[0];
        for &w in h.neighbors(last) {
            if w <= anchor || path.contains(&w) || h.has_loop(w) {
                continue;
            }
            let chord = path
                .iter()
                .any(|&x| x != last && x != anchor && h.has_edge(x, w));
            if chord {
                continue;
            }
            if h.has_edge(w, anchor) {
                if path.len() + 1 >= min_len {
                    path.push(w);
                    let cyc = path.clone();
                    path.pop();
                    return Some(cyc);
                }
                // Extending past an anchor neighbor would leave the chord.
                continue;
            }
            path.push(w);
            if let Some(c) = extend(h, path, min_len) {
                return Some(c);
            }
            path.pop();
        }
        None
    }
    for v in 0..h.n() {
        if h.has_loop(v) {
            continue;
        }
        for &w in h.neighbors(v) {
            if w <= v || h.has_loop(w) {
                continue;
            }
            let mut path = vec![v, w];
            if let Some(c) = extend(h, &mut path, min_len) {
                return Some(c);
            }
        }
    }
    None
}

struct CaSearch<'a> {
    comp_adj: &'a [Vec<bool>],
    n: usize,
    pos_s: Vec<Option<usize>>,
    pos_e: Vec<Option<usize>>,
    nodes: u64,
    budget: u64,
}

#[derive(Clone, Copy, PartialEq)]
enum ArcState {
    Unplaced,
    Open,
    WrapPending,
    Done,
}

impl<'a> CaSearch<'a> {
    fn intersects(&self, u: usize, v: usize) -> bool {
        let (su, eu) = (self.pos_s[u].unwrap(), self.pos_e[u].unwrap());
        let (sv, ev) = (self.pos_s[v].unwrap(), self.pos_e[v].unwrap());
        let inside = |p: usize, s: usize, e: usize| {
            if s <= e {
                s <= p && p <= e
            } else {
                p >= s || p <= e
            }
        };
        inside(su, sv, ev) || inside(sv, su, eu)
    }

    /// Checks every pair whose intersection status is already decided by the
    /// partial placement, plus wrap-forcing constraints on unplaced arcs:
    /// an arc required to meet a completed linear arc can only do so by
    /// wrapping, and wrapping arcs intersect everything already placed.
    fn consistent(&self, states: &[ArcState]) -> bool {
        let n = self.n;
        let wrapped = |v: usize| self.pos_e[v].unwrap() < self.pos_s[v].unwrap();
        use ArcState::{Done, Open, Unplaced, WrapPending};
        for v in 0..n {
            for w in v + 1..n {
                let adj = self.comp_adj[v][w];
                let decided: Option<bool> = if states[v] == Done && states[w] == Done {
                    Some(self.intersects(v, w))
                } else if states[v] == Done || states[w] == Done {
                    let (d, o) = if states[v] == Done { (v, w) } else { (w, v) };
                    if wrapped(d) {
                        // A completed wrapping arc covers every later position.
                        Some(true)
                    } else {
                        match states[o] {
                            Open => Some(self.pos_s[o].unwrap() <= self.pos_e[d].unwrap()),
                            WrapPending => {
                                Some(self.pos_e[o].unwrap() >= self.pos_s[d].unwrap())
                            }
                            // Settled by the wrap-forcing pass below.
                            Unplaced => None,
                            Done => unreachable!(),
                        }
                    }
                } else if (states[v] == Open && states[w] == Open)
                    || (states[v] == WrapPending && states[w] == WrapPending)
                {
                    Some(true)
                } else {
                    None
                };
                if let Some(meet) = decided {
                    if meet != adj {
                        return false;
                    }
                }
            }
        }
        // Wrap forcing: an unplaced arc adjacent to a completed linear arc
        // must wrap; one non-adjacent to a completed linear arc must not.
        let mut must_wrap: Vec<bool> = vec![false; n];
        for w in 0..n {
            if states[w] != ArcState::Unplaced {
                continue;
            }
            let mut wrap = false;
            let mut stay = false;
            for v in 0..n {
                if states[v] == ArcState::Done && !wrapped(v) {
                    if self.comp_adj[v][w] {
                        wrap = true;
                    } else {
                        stay = true;
                    }
                }
            }
            if wrap && stay {
                return false;
            }
            must_wrap[w] = wrap;
        }
        for w in 0..n {
            if !must_wrap[w] {
                continue;
            }
            // A future wrapping arc covers everything placed before it.
            for v in 0..n {
                if v == w || self.comp_adj[v][w] {
                    continue;
                }
                let conflict = match states[v] {
                    ArcState::Open | ArcState::WrapPending => true,
                    ArcState::Done => true,
                    ArcState::Unplaced => must_wrap[v],
                };
                if conflict {
                    return false;
                }
            }
        }
        true
    }

    fn search(
        &mut self,
        pos: usize,
        states: &mut Vec<ArcState>,
        placed_pairs: usize,
        last_event: (bool, usize),
    ) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None; // budget exhausted
        }
        if !self.consistent(states) {
            return Some(false);
        }
        if placed_pairs == self.n && states.iter().all(|s| *s == ArcState::Done) {
            return Some(true);
        }
        if pos >= 2 * self.n {
            return Some(false);
        }
        for v in 0..self.n {
            let state = states[v];
            if state == ArcState::Done {
                continue;
            }
            // Two adjacent starts (or two adjacent ends) always commute, so
            // runs of the same event kind are canonicalized to ascending
            // vertex order.
            let canonical = |is_start: bool| !(last_event.0 == is_start && v < last_event.1);
            match state {
                ArcState::Unplaced => {
                    // Place s_v here (opening v), or e_v (making v wrap).
                    if canonical(true) {
                        self.pos_s[v] = Some(pos);
                        states[v] = ArcState::Open;
                        match self.search(pos + 1, states, placed_pairs, (true, v)) {
                            Some(true) => return Some(true),
                            Some(false) => {}
                            None => return None,
                        }
                        states[v] = ArcState::Unplaced;
                        self.pos_s[v] = None;
                    }
                    if canonical(false) {
                        self.pos_e[v] = Some(pos);
                        states[v] = ArcState::WrapPending;
                        match self.search(pos + 1, states, placed_pairs, (false, v)) {
                            Some(true) => return Some(true),
                            Some(false) => {}
                            None => return None,
                        }
                        states[v] = ArcState::Unplaced;
                        self.pos_e[v] = None;
                    }
                }
                ArcState::Open => {
                    if canonical(false) {
                        self.pos_e[v] = Some(pos);
                        states[v] = ArcState::Done;
                        match self.search(pos + 1, states, placed_pairs + 1, (false, v)) {
                            Some(true) => return Some(true),
                            Some(false) => {}
                            None => return None,
                        }
                        states[v] = ArcState::Open;
                        self.pos_e[v] = None;
                    }
                }
                ArcState::WrapPending => {
                    if canonical(true) {
                        self.pos_s[v] = Some(pos);
                        states[v] = ArcState::Done;
                        match self.search(pos + 1, states, placed_pairs + 1, (true, v)) {
                            Some(true) => return Some(true),
                            Some(false) => {}
                            None => return None,
                        }
                        states[v] = ArcState::WrapPending;
                        self.pos_s[v] = None;
                    }
                }
                ArcState::Done => unreachable!(),
            }
        }
        Some(false)
    }
}

/// Decides whether the complement of a bipartite graph is a circular-arc
/// graph. Fast path: an induced cycle of length at least six certifies "no"
/// at any size. Otherwise an exact model search over endpoint orders runs,
/// with rotation broken by pinning the start of vertex 0.
pub fn is_complement_circular_arc(h: &Graph, cap: usize) -> CircularArcAnswer {
    debug_assert!(h.is_bipartite());
    if let Some(cyc) = find_long_induced_cycle(h, 6) {
        return CircularArcAnswer::No(Some(cyc));
    }
    let n = h.n();
    if n > cap {
        return CircularArcAnswer::Unknown(format!("{n} vertices above cap {cap}"));
    }
    if n == 0 {
        return CircularArcAnswer::Yes(Vec::new());
    }
    // Complement adjacency (distinct vertices).
    let comp_adj: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| u != v && !h.has_edge(u, v)).collect())
        .collect();
    if n == 1 {
        return CircularArcAnswer::Yes(vec![(0, 1)]);
    }
    let mut search = CaSearch {
        comp_adj: &comp_adj,
        n,
        pos_s: vec![None; n],
        pos_e: vec![None; n],
        nodes: 0,
        budget: CA_NODE_BUDGET,
    };
    // Rotate any model so that the start of vertex 0 sits at position 0.
    search.pos_s[0] = Some(0);
    let mut states = vec![ArcState::Unplaced; n];
    states[0] = ArcState::Open;
    match search.search(1, &mut states, 0, (true, 0)) {
        Some(true) => {
            let model: Vec<(usize, usize)> = (0..n)
                .map(|v| (search.pos_s[v].unwrap(), search.pos_e[v].unwrap()))
                .collect();
            CircularArcAnswer::Yes(model)
        }
        Some(false) => CircularArcAnswer::No(None),
        None => CircularArcAnswer::Unknown("model-search budget exhausted".into()),
    }
}

/// Verifies a circular-arc model against the complement of `h`.
pub fn verify_ca_model(h: &Graph, model: &[(usize, usize)]) -> bool {
    let n = h.n();
    if model.len() != n {
        return false;
    }
    let inside = |p: usize, (s, e): (usize, usize)| {
        if s <= e {
            s <= p && p <= e
        } else {
            p >= s || p <= e
        }
    };
    for u in 0..n {
        for v in u + 1..n {
            let meet = inside(model[u].0, model[v]) || inside(model[v].0, model[u]);
            if meet == h.has_edge(u, v) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Base invariants
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvariantKind {
    I,
    Mim,
    Gamma,
    IStar,
    MimStar,
    GammaStar,
}

/// Value plus the witnesses that achieve it: the subgraph vertex set (for
/// starred invariants) and the achieving set or set pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub kind: InvariantKind,
    pub value: usize,
    /// Vertex set of the achieving induced subgraph (the whole graph for the
    /// base invariants).
    pub subgraph: Vec<usize>,
    /// Achieving set (i, mim) or the two sets (gamma).
    pub sets: Vec<Vec<usize>>,
    /// Private neighbors for the mim witness.
    pub private_neighbors: Option<Vec<usize>>,
}

fn subsets(pool: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u64..(1 << pool.len())).map(move |mask| {
        pool.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Maximum incomparable set within one bipartition class (kind `I`), or the
/// strongly incomparable analogue (kind `Mim`, equivalently the maximum
/// induced matching).
pub fn invariant_i(h: &Graph) -> InvariantReport {
    base_set_invariant(h, false)
}

pub fn invariant_mim(h: &Graph) -> InvariantReport {
    base_set_invariant(h, true)
}

fn base_set_invariant(h: &Graph, strong: bool) -> InvariantReport {
    let bip = h.bipartition().expect("base invariants require a bipartite graph");
    let mut best: Option<(Vec<usize>, Option<Vec<usize>>)> = None;
    for class in [&bip.class_x, &bip.class_y] {
        for cand in subsets(class) {
            if cand.is_empty() {
                continue;
            }
            if best.as_ref().is_some_and(|(b, _)| cand.len() <= b.len()) {
                continue;
            }
            if let Ok(w) = check_incomparable(h, &cand, strong) {
                debug_assert!(w.verify(h));
                best = Some((w.set, w.private_neighbors));
            }
        }
    }
    let (set, privs) = best.unwrap_or((Vec::new(), None));
    InvariantReport {
        kind: if strong { InvariantKind::Mim } else { InvariantKind::I },
        value: set.len(),
        subgraph: (0..h.n()).collect(),
        sets: vec![set],
        private_neighbors: if strong { privs } else { None },
    }
}

/// Gamma: the maximum, over qualifying pairs of nonempty incomparable sets
/// `S1, S2` in opposite classes where every member of each set has a
/// neighbor in the other, of the largest count of non-neighbors inside `S2`
/// of a member of `S1`.
pub fn invariant_gamma(h: &Graph) -> InvariantReport {
    let bip = h.bipartition().expect("gamma requires a bipartite graph");
    let mut best_val = 0usize;
    let mut best_sets: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
    let incomparable_ok =
        |s: &[usize]| s.len() <= 1 || check_incomparable(h, s, false).is_ok();
    for (cx, cy) in [(&bip.class_x, &bip.class_y), (&bip.class_y, &bip.class_x)] {
        let s1_cands: Vec<Vec<usize>> =
            subsets(cx).filter(|s| !s.is_empty() && incomparable_ok(s)).collect();
        let s2_cands: Vec<Vec<usize>> =
            subsets(cy).filter(|s| !s.is_empty() && incomparable_ok(s)).collect();
        for s1 in &s1_cands {
            for s2 in &s2_cands {
                let mutual = s1
                    .iter()
                    .all(|&x| s2.iter().any(|&y| h.has_edge(x, y)))
                    && s2.iter().all(|&y| s1.iter().any(|&x| h.has_edge(x, y)));
                if !mutual {
                    continue;
                }
                let val = s1
                    .iter()
                    .map(|&x| s2.iter().filter(|&&y| !h.has_edge(x, y)).count())
                    .max()
                    .unwrap();
                if val > best_val {
                    best_val = val;
                    best_sets = vec![s1.clone(), s2.clone()];
                }
            }
        }
    }
    InvariantReport {
        kind: InvariantKind::Gamma,
        value: best_val,
        subgraph: (0..h.n()).collect(),
        sets: best_sets,
        private_neighbors: None,
    }
}

// ---------------------------------------------------------------------------
// Starred invariants
// ---------------------------------------------------------------------------

/// Connected induced subgraphs (as sorted vertex sets) of `h`.
fn connected_subgraphs(h: &Graph) -> Vec<Vec<usize>> {
    let n = h.n();
    assert!(n <= 26, "subgraph enumeration is for small graphs");
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut stack: Vec<u64> = (0..n).map(|v| 1u64 << v).collect();
    let mut out = Vec::new();
    while let Some(mask) = stack.pop() {
        if !seen.insert(mask) {
            continue;
        }
        out.push(
            (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<usize>>(),
        );
        for v in 0..n {
            if mask >> v & 1 == 1 {
                for &w in h.neighbors(v) {
                    let next = mask | 1 << w;
                    if next != mask && !seen.contains(&next) {
                        stack.push(next);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Whether the subgraph qualifies for the starred maxima: connected (by
/// construction), undecomposable, and not the complement of a circular-arc
/// graph. `None` means the oracle could not decide. Answers are cached up to
/// isomorphism, since subgraph enumeration visits many isomorphic copies.
fn qualifies(sub: &Graph, cap: usize) -> Option<bool> {
    use crate::graph::isomorphic;
    type Key = (usize, usize, Vec<usize>, Vec<Vec<usize>>);
    static CACHE: std::sync::Mutex<Option<std::collections::BTreeMap<Key, Vec<(Graph, Option<bool>)>>>> =
        std::sync::Mutex::new(None);
    let key: Key = {
        let mut degs: Vec<usize> = (0..sub.n()).map(|v| sub.degree(v)).collect();
        degs.sort_unstable();
        let mut nbr_degs: Vec<Vec<usize>> = (0..sub.n())
            .map(|v| {
                let mut ds: Vec<usize> =
                    sub.neighbors(v).iter().map(|&w| sub.degree(w)).collect();
                ds.sort_unstable();
                ds
            })
            .collect();
        nbr_degs.sort();
        (sub.n(), sub.m(), degs, nbr_degs)
    };
    if sub.n() <= 16 {
        let cache = CACHE.lock().unwrap();
        if let Some(map) = cache.as_ref() {
            if let Some(bucket) = map.get(&key) {
                for (g, ans) in bucket {
                    if isomorphic(g, sub) {
                        return *ans;
                    }
                }
            }
        }
    }
    let ans = match is_complement_circular_arc(sub, cap) {
        CircularArcAnswer::Yes(_) => Some(false),
        CircularArcAnswer::No(_) => Some(find_bipartite_decomposition(sub).is_none()),
        CircularArcAnswer::Unknown(_) => {
            if find_bipartite_decomposition(sub).is_some() {
                Some(false)
            } else {
                None
            }
        }
    };
    if sub.n() <= 16 {
        let mut cache = CACHE.lock().unwrap();
        cache
            .get_or_insert_with(std::collections::BTreeMap::new)
            .entry(key)
            .or_default()
            .push((sub.clone(), ans));
    }
    ans
}

/// Starred invariant: the base invariant maximized over connected,
/// undecomposable induced subgraphs that are not complements of circular-arc
/// graphs. Non-bipartite targets (or targets with loops) are lifted to the
/// associated bipartite graph first. Gamma-star falls back to one when no
/// subgraph qualifies. Subgraphs the oracle cannot decide are tolerated as
/// long as their base value cannot beat the qualifying maximum.
pub fn invariant_star(
    h: &Graph,
    kind: InvariantKind,
    cap: usize,
) -> Result<InvariantReport, InvariantError> {
    let bipartite = h.is_bipartite();
    let work = if bipartite { h.clone() } else { associated_bipartite(h) };
    let (base_kind, star_kind) = match kind {
        InvariantKind::I | InvariantKind::IStar => (InvariantKind::I, InvariantKind::IStar),
        InvariantKind::Mim | InvariantKind::MimStar => {
            (InvariantKind::Mim, InvariantKind::MimStar)
        }
        InvariantKind::Gamma | InvariantKind::GammaStar => {
            (InvariantKind::Gamma, InvariantKind::GammaStar)
        }
    };
    let mut best: Option<InvariantReport> = None;
    let mut undecided_max: usize = 0;
    let mut undecided_witness: Option<Vec<usize>> = None;
    for verts in connected_subgraphs(&work) {
        let (sub, map) = work.induced(&verts);
        let report = match base_kind {
            InvariantKind::I => invariant_i(&sub),
            InvariantKind::Mim => invariant_mim(&sub),
            _ => invariant_gamma(&sub),
        };
        match qualifies(&sub, cap) {
            Some(false) => {}
            Some(true) => {
                if best.as_ref().map_or(true, |b| report.value > b.value) {
                    best = Some(InvariantReport {
                        kind: star_kind,
                        value: report.value,
                        subgraph: map.clone(),
                        sets: report
                            .sets
                            .iter()
                            .map(|s| s.iter().map(|&v| map[v]).collect())
                            .collect(),
                        private_neighbors: report
                            .private_neighbors
                            .as_ref()
                            .map(|ps| ps.iter().map(|&v| map[v]).collect()),
                    });
                }
            }
            None => {
                if report.value > undecided_max {
                    undecided_max = report.value;
                    undecided_witness = Some(map.clone());
                }
            }
        }
    }
    let best_val = best.as_ref().map(|b| b.value).unwrap_or(0);
    if undecided_max > best_val {
        return Err(InvariantError::Unknown(format!(
            "oracle undecided on subgraph {:?} with base value {} above the qualifying maximum {}",
            undecided_witness.unwrap_or_default(),
            undecided_max,
            best_val
        )));
    }
    Ok(best.unwrap_or(InvariantReport {
        kind: star_kind,
        value: if star_kind == InvariantKind::GammaStar { 1 } else { 0 },
        subgraph: Vec::new(),
        sets: Vec::new(),
        private_neighbors: None,
    }))
}

// ---------------------------------------------------------------------------
// Small-graph corpus
// ---------------------------------------------------------------------------

/// All connected bipartite graphs on at most `max_n` vertices, one
/// representative per isomorphism class. Canonical form: the minimum
/// adjacency bit string over class-preserving permutations (and the class
/// swap for balanced splits).
pub fn connected_bipartite_corpus(max_n: usize) -> Vec<Graph> {
    assert!(max_n <= 8);
    let mut out: Vec<Graph> = Vec::new();
    let mut seen: BTreeSet<(usize, usize, Vec<u64>)> = BTreeSet::new();
    for n in 1..=max_n {
        if n == 1 {
            out.push(Graph::from_edges(1, &[]));
            continue;
        }
        for a in 1..=n / 2 {
            let b = n - a;
            let cells = a * b;
            for mask in 0u64..(1 << cells) {
                let edges: Vec<(usize, usize)> = (0..cells)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| (i / b, a + i % b))
                    .collect();
                if edges.len() + 1 < n {
                    continue; // cannot be connected
                }
                let g = Graph::from_edges(n, &edges);
                if !g.is_connected() {
                    continue;
                }
                let canon = canonical_bipartite_code(a, b, &g);
                if seen.insert((a, b, canon)) {
                    out.push(g);
                }
            }
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

fn canonical_bipartite_code(a: usize, b: usize, g: &Graph) -> Vec<u64> {
    let encode = |pa: &[usize], pb: &[usize], swap: bool| -> Vec<u64> {
        let mut bits: Vec<u64> = vec![0; (a * b + 63) / 64];
        let mut idx = 0usize;
        for i in 0..a.max(b) {
            for j in 0..a.max(b) {
                let (u, v) = if !swap {
                    if i >= a || j >= b {
                        continue;
                    }
                    (pa[i], a + pb[j])
                } else {
                    if i >= b || j >= a {
                        continue;
                    }
                    (pb[i] + a, pa[j])
                };
                if g.has_edge(u, v) {
                    bits[idx / 64] |= 1 << (idx % 64);
                }
                idx += 1;
            }
        }
        bits
    };
    let perms_a = permutations(a);
    let perms_b = permutations(b);
    let mut best: Option<Vec<u64>> = None;
    for pa in &perms_a {
        for pb in &perms_b {
            let code = encode(pa, pb, false);
            if best.as_ref().map_or(true, |b| code < *b) {
                best = Some(code);
            }
            if a == b {
                let code = encode(pa, pb, true);
                if best.as_ref().map_or(true, |b| code < *b) {
                    best = Some(code);
                }
            }
        }
    }
    best.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{biclique, crown, cycle, path, Graph};
    use std::collections::BTreeMap;

    #[test]
    fn c6_is_undecomposable() {
        // Exhaustive oracle over all 3-partitions.
        let h = cycle(6);
        let mut found = false;
        for mask in 0u32..3u32.pow(6) {
            let mut m = mask;
            let mut d = BTreeSet::new();
            let mut nn = BTreeSet::new();
            let mut r = BTreeSet::new();
            for v in 0..6 {
                match m % 3 {
                    0 => d.insert(v),
                    1 => nn.insert(v),
                    _ => r.insert(v),
                };
                m /= 3;
            }
            let cand = BipartiteDecomposition { d_set: d, n_set: nn, r_set: r };
            if cand.verify(&h) {
                found = true;
            }
        }
        assert!(!found);
        assert_eq!(find_bipartite_decomposition(&h), None);
    }

    #[test]
    fn single_edge_is_undecomposable() {
        assert_eq!(find_bipartite_decomposition(&path(2)), None);
    }

    #[test]
    fn synthetic_decomposition_is_found_and_verifies() {
        // D = {0, 1} (class X) and {2} (class Y); N = {3 (X), 4 (Y)};
        // R = {5 (X), 6 (Y)}. Black edges: D∩X joined to N∩Y, D∩Y to N∩X,
        // N internally complete; orange extras behind N.
        let edges = [
            (0, 4),
            (1, 4),
            (3, 2),
            (3, 4),
            (5, 4),
            (3, 6),
            (5, 6),
            (0, 2),
        ];
        let h = Graph::from_edges(7, &edges);
        assert!(h.is_connected());
        let dec = find_bipartite_decomposition(&h).expect("decomposable by construction");
        assert!(dec.verify(&h));
    }

    #[test]
    fn crown_graphs_are_undecomposable() {
        for r in 3..=4 {
            assert_eq!(find_bipartite_decomposition(&crown(r)), None);
        }
    }

    #[test]
    fn bicliques_are_decomposable_or_small() {
        // K_{2,2}: D one class, N the other, R empty.
        let h = biclique(2, 2);
        let dec = find_bipartite_decomposition(&h);
        assert!(dec.is_some());
        assert!(dec.unwrap().verify(&h));
    }

    #[test]
    fn induced_cycle_detection() {
        assert!(find_long_induced_cycle(&cycle(6), 6).is_some());
        assert!(find_long_induced_cycle(&cycle(8), 6).is_some());
        assert!(find_long_induced_cycle(&cycle(4), 6).is_none());
        assert!(find_long_induced_cycle(&biclique(3, 3), 6).is_none());
        // Crown contains an induced C6.
        assert!(find_long_induced_cycle(&crown(4), 6).is_some());
        let c = find_long_induced_cycle(&crown(4), 6).unwrap();
        assert!(c.len() >= 6);
    }

    #[test]
    fn circular_arc_oracle_fast_paths() {
        match is_complement_circular_arc(&cycle(6), DEFAULT_CA_CAP) {
            CircularArcAnswer::No(Some(cyc)) => assert_eq!(cyc.len(), 6),
            other => panic!("expected induced-cycle witness, got {other:?}"),
        }
        match is_complement_circular_arc(&cycle(8), DEFAULT_CA_CAP) {
            CircularArcAnswer::No(Some(cyc)) => assert_eq!(cyc.len(), 8),
            other => panic!("expected induced-cycle witness, got {other:?}"),
        }
    }

    #[test]
    fn circular_arc_oracle_small_yes_instances() {
        // A single edge: complement of K2 is empty, two disjoint arcs.
        match is_complement_circular_arc(&path(2), DEFAULT_CA_CAP) {
            CircularArcAnswer::Yes(model) => assert!(verify_ca_model(&path(2), &model)),
            other => panic!("expected yes, got {other:?}"),
        }
        // Paths and bicliques are complements of circular-arc graphs.
        for h in [path(4), path(6), biclique(2, 3), biclique(3, 3), cycle(4)] {
            match is_complement_circular_arc(&h, DEFAULT_CA_CAP) {
                CircularArcAnswer::Yes(model) => assert!(verify_ca_model(&h, &model)),
                other => panic!("expected yes for {h:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn circular_arc_oracle_respects_cap() {
        match is_complement_circular_arc(&path(15), 14) {
            CircularArcAnswer::Unknown(_) => {}
            other => panic!("expected unknown above cap, got {other:?}"),
        }
    }

    #[test]
    fn c6_invariants() {
        let h = cycle(6);
        let i = invariant_i(&h);
        assert_eq!(i.value, 3);
        let mim = invariant_mim(&h);
        assert_eq!(mim.value, 2);
        // The witness is an induced matching.
        let set = &mim.sets[0];
        let privs = mim.private_neighbors.as_ref().unwrap();
        for (k, &u) in set.iter().enumerate() {
            assert!(h.has_edge(u, privs[k]));
        }
        let gamma = invariant_gamma(&h);
        assert_eq!(gamma.value, 1);
    }

    #[test]
    fn crown_invariants_match_reported_values() {
        for r in 3..=5 {
            let h = crown(r);
            assert_eq!(invariant_i(&h).value, r);
            assert_eq!(invariant_gamma(&h).value, 1);
            assert_eq!(invariant_mim(&h).value, 2);
        }
    }

    #[test]
    fn starred_invariants_on_cliques() {
        for k in 3..=5 {
            let h = crate::graph::complete(k);
            assert_eq!(invariant_star(&h, InvariantKind::IStar, DEFAULT_CA_CAP).unwrap().value, k);
            assert_eq!(
                invariant_star(&h, InvariantKind::MimStar, DEFAULT_CA_CAP).unwrap().value,
                2
            );
            assert_eq!(
                invariant_star(&h, InvariantKind::GammaStar, DEFAULT_CA_CAP).unwrap().value,
                1
            );
        }
    }

    #[test]
    fn starred_mim_on_cycles() {
        // Odd k: 2k-cycle associated graph; even k: the cycle itself.
        assert_eq!(
            invariant_star(&cycle(5), InvariantKind::MimStar, DEFAULT_CA_CAP).unwrap().value,
            3
        );
        assert_eq!(
            invariant_star(&cycle(6), InvariantKind::MimStar, DEFAULT_CA_CAP).unwrap().value,
            2
        );
        assert_eq!(
            invariant_star(&cycle(7), InvariantKind::MimStar, DEFAULT_CA_CAP).unwrap().value,
            4
        );
    }

    #[test]
    fn star_on_bipartite_equals_star_on_associated() {
        for h in [cycle(6), crown(3), cycle(8)] {
            let direct = invariant_star(&h, InvariantKind::IStar, DEFAULT_CA_CAP).unwrap();
            let doubled = invariant_star(
                &associated_bipartite(&h),
                InvariantKind::IStar,
                DEFAULT_CA_CAP,
            )
            .unwrap();
            assert_eq!(direct.value, doubled.value);
        }
    }

    #[test]
    fn i_star_bounded_by_vertex_count() {
        for h in [cycle(6), crown(4), crate::graph::complete(4)] {
            let v = invariant_star(&h, InvariantKind::IStar, DEFAULT_CA_CAP).unwrap().value;
            assert!(v <= h.n());
        }
    }

    #[test]
    fn corpus_generation_counts() {
        let corpus = connected_bipartite_corpus(6);
        // Known counts of connected bipartite graphs: 1, 1, 1, 3, 5, 17.
        let per_n: BTreeMap<usize, usize> =
            corpus.iter().fold(BTreeMap::new(), |mut m, g| {
                *m.entry(g.n()).or_default() += 1;
                m
            });
        assert_eq!(per_n[&1], 1);
        assert_eq!(per_n[&2], 1);
        assert_eq!(per_n[&3], 1);
        assert_eq!(per_n[&4], 3);
        assert_eq!(per_n[&5], 5);
        assert_eq!(per_n[&6], 17);
    }
}
