//! Undirected graphs with optional loops.
//!
//! Vertices are dense indices `0..n`. The neighborhood `N(v)` contains `v`
//! itself exactly when `v` carries a loop, and `deg(v) = |N(v)|`, so a loop
//! contributes one to the degree. All values are immutable after
//! construction; queries are pure.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// The graph contains an odd closed walk; the witness lists its vertices.
    #[error("graph is not bipartite (odd closed walk {0:?})")]
    NotBipartite(Vec<usize>),
}

/// An undirected graph with optional loops and an optional label table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge list. Duplicate edges are
    /// collapsed; a pair `(v, v)` is a loop.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for n={n}");
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            adj[u].push(v);
            if u != v {
                adj[v].push(u);
            }
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Graph { adj, m: set.len(), labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Graph {
        assert_eq!(labels.len(), self.n());
        self.labels = Some(labels);
        self
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges; a loop counts once.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.n()
    }

    /// Edges as pairs `(u, v)` with `u <= v`; loops appear as `(v, v)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u <= v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// `N(v)`, which includes `v` itself iff `v` has a loop.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.has_edge(v, v)
    }

    pub fn has_any_loop(&self) -> bool {
        (0..self.n()).any(|v| self.has_loop(v))
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The label of `v`, falling back to its index rendered as text.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(ls) => ls[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(ls) => ls.iter().position(|l| l == label),
            None => label.parse::<usize>().ok().filter(|&v| v < self.n()),
        }
    }

    /// Two vertices are incomparable when neither neighborhood contains the other.
    pub fn incomparable(&self, u: usize, v: usize) -> bool {
        let nu: BTreeSet<_> = self.adj[u].iter().collect();
        let nv: BTreeSet<_> = self.adj[v].iter().collect();
        !nu.is_subset(&nv) && !nv.is_subset(&nu)
    }

    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut comps = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// BFS distances from `s`; unreachable vertices get `None`.
    pub fn bfs_distances(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn dist(&self, u: usize, v: usize) -> Option<usize> {
        self.bfs_distances(u)[v]
    }

    /// Length of a shortest cycle, `None` for forests. A loop is a cycle of
    /// length one.
    pub fn girth(&self) -> Option<usize> {
        if (0..self.n()).any(|v| self.has_loop(v)) {
            return Some(1);
        }
        let mut best: Option<usize> = None;
        for s in 0..self.n() {
            // BFS from s; the first non-tree edge seen at minimal depth closes
            // a shortest cycle through s.
            let mut dist = vec![usize::MAX; self.n()];
            let mut parent = vec![usize::MAX; self.n()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v && parent[v] != u {
                        let len = dist[u] + dist[v] + 1;
                        if best.map_or(true, |b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }

    /// True when no cycle (including loops) exists.
    pub fn is_forest(&self) -> bool {
        if (0..self.n()).any(|v| self.has_loop(v)) {
            return false;
        }
        let comps = self.connected_components();
        self.m == self.n().saturating_sub(comps.len())
    }

    /// Induced subgraph on `verts` (sorted, deduplicated); returns the graph
    /// together with the map new index -> old index.
    pub fn induced(&self, verts: &[usize]) -> (Graph, Vec<usize>) {
        let mut vs: Vec<usize> = verts.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in vs.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vs.iter().enumerate() {
            for &w in &self.adj[v] {
                if w >= v && pos[w] != usize::MAX {
                    edges.push((i, pos[w]));
                }
            }
        }
        let g = Graph::from_edges(vs.len(), &edges);
        let g = match &self.labels {
            Some(ls) => g.with_labels(vs.iter().map(|&v| ls[v].clone()).collect()),
            None => g,
        };
        (g, vs)
    }

    /// Proper 2-coloring of every component merged deterministically: the
    /// lowest-index vertex of each component lands in `class_x`.
    pub fn bipartition(&self) -> Result<Bipartition, GraphError> {
        let mut color = vec![u8::MAX; self.n()];
        let mut parent = vec![usize::MAX; self.n()];
        for s in 0..self.n() {
            if color[s] != u8::MAX {
                continue;
            }
            if self.has_loop(s) {
                return Err(GraphError::NotBipartite(vec![s]));
            }
            color[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if v == u {
                        return Err(GraphError::NotBipartite(vec![u]));
                    }
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        parent[v] = u;
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        // Reconstruct an odd closed walk through the BFS tree.
                        let mut pu = vec![u];
                        while *pu.last().unwrap() != s {
                            pu.push(parent[*pu.last().unwrap()]);
                        }
                        let mut pv = vec![v];
                        while *pv.last().unwrap() != s {
                            pv.push(parent[*pv.last().unwrap()]);
                        }
                        pu.reverse();
                        pu.extend(pv);
                        return Err(GraphError::NotBipartite(pu));
                    }
                }
            }
        }
        let mut class_x = Vec::new();
        let mut class_y = Vec::new();
        for v in 0..self.n() {
            if color[v] == 0 {
                class_x.push(v);
            } else {
                class_y.push(v);
            }
        }
        Ok(Bipartition { class_x, class_y })
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_ok()
    }

    /// Degree, distance and girth summary used by small-graph checks.
    pub fn metrics(&self) -> GraphMetrics {
        let dist = (0..self.n()).map(|v| self.bfs_distances(v)).collect();
        GraphMetrics { girth: self.girth(), max_degree: self.max_degree(), dist }
    }
}

/// The two color classes of a loopless bipartite graph. Classes of distinct
/// components are merged with the lowest-index vertex of each component in
/// `class_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub class_x: Vec<usize>,
    pub class_y: Vec<usize>,
}

impl Bipartition {
    pub fn side_of(&self, v: usize) -> u8 {
        if self.class_x.binary_search(&v).is_ok() {
            0
        } else {
            1
        }
    }

    pub fn class(&self, side: u8) -> &[usize] {
        if side == 0 {
            &self.class_x
        } else {
            &self.class_y
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMetrics {
    /// `None` means the graph is a forest.
    pub girth: Option<usize>,
    pub max_degree: usize,
    pub dist: Vec<Vec<Option<usize>>>,
}

/// Which flavor of incomparability a witness certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncomparabilityKind {
    Incomparable,
    StronglyIncomparable,
}

/// A certified (strongly) incomparable set. For the strong flavor,
/// `private_neighbors[i]` is a neighbor of `set[i]` that is non-adjacent to
/// every other member of the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncomparabilityWitness {
    pub set: Vec<usize>,
    pub kind: IncomparabilityKind,
    pub private_neighbors: Option<Vec<usize>>,
}

impl IncomparabilityWitness {
    /// Re-verifies the witness against `h` from the definitions.
    pub fn verify(&self, h: &Graph) -> bool {
        for (i, &u) in self.set.iter().enumerate() {
            for &v in &self.set[i + 1..] {
                if !h.incomparable(u, v) {
                    return false;
                }
            }
        }
        match self.kind {
            IncomparabilityKind::Incomparable => self.private_neighbors.is_none(),
            IncomparabilityKind::StronglyIncomparable => match &self.private_neighbors {
                None => false,
                Some(privs) => {
                    privs.len() == self.set.len()
                        && self.set.iter().zip(privs).all(|(&u, &pu)| {
                            h.has_edge(u, pu)
                                && self.set.iter().all(|&w| w == u || !h.has_edge(pu, w))
                        })
                }
            },
        }
    }
}

/// Why an incomparability check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IncomparabilityFailure {
    /// `N(a) ⊆ N(b)` for the named ordered pair.
    ComparablePair { a: usize, b: usize },
    /// The named member has no private neighbor.
    NoPrivateNeighbor { member: usize },
    EmptySet,
}

/// Checks whether `s` is an incomparable set of `h` (strongly incomparable
/// when `strong` is set), returning either a witness or the violation.
pub fn check_incomparable(
    h: &Graph,
    s: &[usize],
    strong: bool,
) -> Result<IncomparabilityWitness, IncomparabilityFailure> {
    if s.is_empty() {
        return Err(IncomparabilityFailure::EmptySet);
    }
    let mut set: Vec<usize> = s.to_vec();
    set.sort_unstable();
    set.dedup();
    for &u in &set {
        for &v in &set {
            if u == v {
                continue;
            }
            let nu: BTreeSet<_> = h.neighbors(u).iter().collect();
            let nv: BTreeSet<_> = h.neighbors(v).iter().collect();
            if nu.is_subset(&nv) {
                return Err(IncomparabilityFailure::ComparablePair { a: u, b: v });
            }
        }
    }
    if !strong {
        return Ok(IncomparabilityWitness {
            set,
            kind: IncomparabilityKind::Incomparable,
            private_neighbors: None,
        });
    }
    let mut privs = Vec::with_capacity(set.len());
    for &u in &set {
        let found = h
            .neighbors(u)
            .iter()
            .find(|&&p| set.iter().all(|&w| w == u || !h.has_edge(p, w)));
        match found {
            Some(&p) => privs.push(p),
            None => return Err(IncomparabilityFailure::NoPrivateNeighbor { member: u }),
        }
    }
    Ok(IncomparabilityWitness {
        set,
        kind: IncomparabilityKind::StronglyIncomparable,
        private_neighbors: Some(privs),
    })
}

/// The associated bipartite graph: vertices `v'` (index `v`) and `v''`
/// (index `n + v`), with `u'v''` an edge iff `uv` is an edge of `h`.
/// The index pairing `v <-> (v, n+v)` is the carrier of the construction.
pub fn associated_bipartite(h: &Graph) -> Graph {
    let n = h.n();
    let mut edges = Vec::new();
    for (u, v) in h.edges() {
        edges.push((u, n + v));
        if u != v {
            edges.push((v, n + u));
        }
    }
    let g = Graph::from_edges(2 * n, &edges);
    let labels = (0..n)
        .map(|v| format!("{}'", h.label(v)))
        .chain((0..n).map(|v| format!("{}''", h.label(v))))
        .collect();
    g.with_labels(labels)
}

/// Cycle on `k` vertices, `0-1-...-(k-1)-0`.
pub fn cycle(k: usize) -> Graph {
    let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    Graph::from_edges(k, &edges)
}

/// Path on `k` vertices.
pub fn path(k: usize) -> Graph {
    let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
    Graph::from_edges(k, &edges)
}

/// Complete graph on `k` vertices (loopless).
pub fn complete(k: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.push((u, v));
        }
    }
    Graph::from_edges(k, &edges)
}

/// Complete bipartite graph with classes `0..a` and `a..a+b`.
pub fn biclique(a: usize, b: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in 0..b {
            edges.push((u, a + v));
        }
    }
    Graph::from_edges(a + b, &edges)
}

/// `K_{r,r}` minus a perfect matching; vertex `i` is matched to `r + i`.
pub fn crown(r: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..r {
        for v in 0..r {
            if u != v {
                edges.push((u, r + v));
            }
        }
    }
    Graph::from_edges(2 * r, &edges)
}

/// Backtracking isomorphism test for small graphs. Used by small-graph
/// checks and caches; not a general service.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.n() != b.n() || a.m() != b.m() {
        return false;
    }
    let n = a.n();
    if n > 16 {
        panic!("isomorphism checker is limited to 16 vertices");
    }
    let mut da: Vec<usize> = (0..n).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..n).map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    fn extend(a: &Graph, b: &Graph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let u = map.len();
        if u == a.n() {
            return true;
        }
        for w in 0..b.n() {
            if used[w] || a.degree(u) != b.degree(w) || a.has_loop(u) != b.has_loop(w) {
                continue;
            }
            let ok = (0..u).all(|x| a.has_edge(x, u) == b.has_edge(map[x], w));
            if ok {
                map.push(w);
                used[w] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[w] = false;
            }
        }
        false
    }
    extend(a, b, &mut Vec::new(), &mut vec![false; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_appears_in_own_neighborhood() {
        let g = Graph::from_edges(2, &[(0, 0), (0, 1)]);
        assert_eq!(g.neighbors(0), &[0, 1]);
        assert_eq!(g.degree(0), 2);
        assert!(g.has_loop(0));
        assert!(!g.has_loop(1));
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn bipartition_c6() {
        let g = cycle(6);
        let b = g.bipartition().unwrap();
        assert_eq!(b.class_x, vec![0, 2, 4]);
        assert_eq!(b.class_y, vec![1, 3, 5]);
        // Classes are independent sets.
        for &u in &b.class_x {
            for &v in &b.class_x {
                assert!(!g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn bipartition_rejects_odd_cycle() {
        let g = complete(3);
        match g.bipartition() {
            Err(GraphError::NotBipartite(walk)) => {
                // The witness is an odd closed walk.
                assert!(walk.len() >= 3);
            }
            other => panic!("expected NotBipartite, got {other:?}"),
        }
    }

    #[test]
    fn bipartition_single_vertex() {
        let g = Graph::from_edges(1, &[]);
        let b = g.bipartition().unwrap();
        assert_eq!(b.class_x, vec![0]);
        assert!(b.class_y.is_empty());
    }

    #[test]
    fn bipartition_merges_components_deterministically() {
        // Two disjoint edges: lowest vertex of each component in class_x.
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let b = g.bipartition().unwrap();
        assert_eq!(b.class_x, vec![0, 2]);
        assert_eq!(b.class_y, vec![1, 3]);
    }

    #[test]
    fn associated_bipartite_of_bipartite_graph_is_two_copies() {
        for h in [cycle(6), path(4), biclique(2, 3)] {
            let star = associated_bipartite(&h);
            assert_eq!(star.m(), 2 * h.m());
            let comps = star.connected_components();
            if h.is_connected() && h.n() > 1 {
                assert_eq!(comps.len(), 2);
                for comp in comps {
                    let (sub, _) = star.induced(&comp);
                    assert!(isomorphic(&sub, &h));
                }
            }
        }
    }

    #[test]
    fn associated_bipartite_loop_becomes_edge() {
        let h = Graph::from_edges(1, &[(0, 0)]);
        let star = associated_bipartite(&h);
        assert_eq!(star.n(), 2);
        assert_eq!(star.m(), 1);
        assert!(star.has_edge(0, 1));
        assert!(star.is_bipartite());
    }

    #[test]
    fn associated_bipartite_k3_is_c6() {
        let star = associated_bipartite(&complete(3));
        assert!(isomorphic(&star, &cycle(6)));
    }

    #[test]
    fn associated_bipartite_is_always_bipartite() {
        for h in [complete(4), cycle(5), Graph::from_edges(3, &[(0, 0), (0, 1), (1, 2), (2, 2)])] {
            let star = associated_bipartite(&h);
            let b = star.bipartition().unwrap();
            // One class is the primed copy, the other the double-primed copy.
            for v in 0..h.n() {
                assert_ne!(b.side_of(v), b.side_of(h.n() + v));
            }
            let loops = (0..h.n()).filter(|&v| h.has_loop(v)).count();
            let nonloops = h.m() - loops;
            assert_eq!(star.m(), 2 * nonloops + loops);
        }
    }

    #[test]
    fn incomparable_triple_in_c6() {
        let c6 = cycle(6);
        // Spec's w1..w6 is our 0..5: {w1,w3,w5} = {0,2,4}.
        let w = check_incomparable(&c6, &[0, 2, 4], false).unwrap();
        assert!(w.verify(&c6));
        // Exhaustive cross-check of the definition.
        for &u in &[0usize, 2, 4] {
            for &v in &[0usize, 2, 4] {
                if u != v {
                    assert!(c6
                        .neighbors(u)
                        .iter()
                        .any(|&p| !c6.has_edge(p, v) && !c6.neighbors(v).contains(&p)));
                }
            }
        }
    }

    #[test]
    fn c6_class_is_not_strongly_incomparable() {
        let c6 = cycle(6);
        match check_incomparable(&c6, &[0, 2, 4], true) {
            Err(IncomparabilityFailure::NoPrivateNeighbor { member }) => {
                // Every neighbor of the member touches another member.
                for &p in c6.neighbors(member) {
                    assert!([0, 2, 4].iter().any(|&w| w != member && c6.has_edge(p, w)));
                }
            }
            other => panic!("expected NoPrivateNeighbor, got {other:?}"),
        }
    }

    #[test]
    fn singleton_with_neighbor_is_strongly_incomparable() {
        let g = path(3);
        let w = check_incomparable(&g, &[1], true).unwrap();
        assert!(w.verify(&g));
        assert_eq!(w.private_neighbors.unwrap().len(), 1);
    }

    #[test]
    fn strong_witness_implies_plain_incomparability() {
        // Induced matching endpoints in a crown graph.
        let h = crown(4);
        let w = check_incomparable(&h, &[0, 1], true).unwrap();
        assert!(w.verify(&h));
        assert!(check_incomparable(&h, &[0, 1], false).is_ok());
    }

    #[test]
    fn metrics_examples() {
        assert_eq!(cycle(6).metrics().girth, Some(6));
        assert_eq!(cycle(6).metrics().max_degree, 2);
        assert_eq!(path(7).metrics().girth, None);
        assert_eq!(complete(4).metrics().girth, Some(3));
        assert_eq!(complete(4).metrics().max_degree, 3);
        let g = Graph::from_edges(3, &[(0, 0), (0, 1)]);
        assert_eq!(g.girth(), Some(1));
    }

    #[test]
    fn distances_by_bfs() {
        let g = cycle(6);
        assert_eq!(g.dist(0, 3), Some(3));
        assert_eq!(g.dist(0, 5), Some(1));
        let h = Graph::from_edges(3, &[(0, 1)]);
        assert_eq!(h.dist(0, 2), None);
    }

    #[test]
    fn induced_subgraph_keeps_structure() {
        let g = cycle(6);
        let (sub, map) = g.induced(&[0, 1, 2, 3]);
        assert_eq!(map, vec![0, 1, 2, 3]);
        assert!(isomorphic(&sub, &path(4)));
    }

    #[test]
    fn crown_is_c6_for_r3() {
        assert!(isomorphic(&crown(3), &cycle(6)));
    }

    #[test]
    fn forest_detection() {
        assert!(path(5).is_forest());
        assert!(!cycle(4).is_forest());
        assert!(!Graph::from_edges(1, &[(0, 0)]).is_forest());
    }
}
