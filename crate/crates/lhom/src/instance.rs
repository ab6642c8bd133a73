//! List-homomorphism instances, consistency normalization, the binary-CSP
//! data model, and the encoders into it.
//!
//! Domain values of a [`BcspInstance`] are positive integers; `0` is reserved
//! as the "no forbidden value" sentinel of the slot maps, so list encoders
//! shift target-vertex indices up by one.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Bipartition, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("target graph must be bipartite and loopless")]
    TargetNotBipartite,
    #[error("operation requires a connected instance graph")]
    InstanceDisconnected,
    /// A DP-coloring cover violates the numbered cover condition.
    #[error("invalid cover: condition {condition} violated ({witness})")]
    InvalidCover { condition: u8, witness: String },
}

/// An instance `(G, L)` of LHom(H): instance graph, target graph, and a list
/// of allowed target vertices per instance vertex. Empty lists are legal and
/// make the instance trivially unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListInstance {
    pub g: Graph,
    pub h: Graph,
    pub lists: Vec<BTreeSet<usize>>,
}

impl ListInstance {
    pub fn new(g: Graph, h: Graph, lists: Vec<BTreeSet<usize>>) -> ListInstance {
        assert_eq!(lists.len(), g.n());
        for l in &lists {
            for &x in l {
                assert!(x < h.n(), "list value {x} outside target graph");
            }
        }
        ListInstance { g, h, lists }
    }

    /// Instance with every list equal to the full vertex set of `h`.
    pub fn full_lists(g: Graph, h: Graph) -> ListInstance {
        let all: BTreeSet<usize> = (0..h.n()).collect();
        let lists = vec![all; g.n()];
        ListInstance { g, h, lists }
    }

    /// Checks a candidate assignment against edges and lists.
    pub fn check_homomorphism(&self, phi: &[usize]) -> bool {
        if phi.len() != self.g.n() {
            return false;
        }
        for v in 0..self.g.n() {
            if !self.lists[v].contains(&phi[v]) {
                return false;
            }
        }
        self.g.edges().iter().all(|&(u, v)| self.h.has_edge(phi[u], phi[v]))
    }
}

/// Outcome of consistency normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyStatus {
    /// The input already fixed one class orientation; the normalized instance
    /// is returned as-is.
    Consistent(ListInstance),
    /// Both class orientations remain possible; the instance is satisfiable
    /// iff at least one of the two is.
    Split(Box<(ListInstance, ListInstance)>),
    Rejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub status: ConsistencyStatus,
    /// `(vertex, removed target value)` events in removal order.
    pub removed_dominated: Vec<(usize, usize)>,
}

/// Removes dominated values from every list to a fixpoint: `x` is dropped
/// when some other `y` in the same list has `N(x) ⊆ N(y)`; when the
/// neighborhoods are equal the lower index goes. Deterministic sweep order.
fn remove_dominated(h: &Graph, lists: &mut [BTreeSet<usize>]) -> Vec<(usize, usize)> {
    let nbr: Vec<BTreeSet<usize>> =
        (0..h.n()).map(|v| h.neighbors(v).iter().copied().collect()).collect();
    let mut events = Vec::new();
    for v in 0..lists.len() {
        loop {
            let vals: Vec<usize> = lists[v].iter().copied().collect();
            let mut removed = None;
            'scan: for &x in &vals {
                for &y in &vals {
                    if x == y {
                        continue;
                    }
                    if nbr[x].is_subset(&nbr[y]) && (nbr[x] != nbr[y] || x < y) {
                        removed = Some(x);
                        break 'scan;
                    }
                }
            }
            match removed {
                Some(x) => {
                    lists[v].remove(&x);
                    events.push((v, x));
                }
                None => break,
            }
        }
    }
    events
}

fn orient_lists(
    inst: &ListInstance,
    gb: &Bipartition,
    hb: &Bipartition,
    flip: bool,
) -> Vec<BTreeSet<usize>> {
    (0..inst.g.n())
        .map(|v| {
            let side = gb.side_of(v) ^ (flip as u8);
            let class: BTreeSet<usize> = hb.class(side).iter().copied().collect();
            inst.lists[v].intersection(&class).copied().collect()
        })
        .collect()
}

/// Normalizes a connected instance with a bipartite loopless target into
/// consistent form: rejects non-bipartite instance graphs, intersects lists
/// with the proper target class for each of the two orientations, and removes
/// dominated values to a fixpoint.
pub fn normalize_consistent(inst: &ListInstance) -> Result<ConsistencyReport, InstanceError> {
    let hb = match inst.h.bipartition() {
        Ok(b) if !inst.h.has_any_loop() => b,
        _ => return Err(InstanceError::TargetNotBipartite),
    };
    if !inst.g.is_connected() {
        return Err(InstanceError::InstanceDisconnected);
    }
    let gb = match inst.g.bipartition() {
        Ok(b) => b,
        Err(_) => {
            return Ok(ConsistencyReport {
                status: ConsistencyStatus::Rejected("instance graph is not bipartite".into()),
                removed_dominated: Vec::new(),
            })
        }
    };

    let pure = |flip: bool| {
        (0..inst.g.n()).all(|v| {
            let side = gb.side_of(v) ^ (flip as u8);
            inst.lists[v].iter().all(|&x| hb.side_of(x) == side)
        })
    };

    let build = |flip: bool, events: &mut Vec<(usize, usize)>| {
        let mut lists = orient_lists(inst, &gb, &hb, flip);
        events.extend(remove_dominated(&inst.h, &mut lists));
        ListInstance { g: inst.g.clone(), h: inst.h.clone(), lists }
    };

    let mut removed_dominated = Vec::new();
    let status = if pure(false) {
        ConsistencyStatus::Consistent(build(false, &mut removed_dominated))
    } else if pure(true) {
        ConsistencyStatus::Consistent(build(true, &mut removed_dominated))
    } else {
        let a = build(false, &mut removed_dominated);
        let b = build(true, &mut removed_dominated);
        ConsistencyStatus::Split(Box::new((a, b)))
    };
    Ok(ConsistencyReport { status, removed_dominated })
}

/// A binary CSP `(V, D, C)`. Domains are finite sets of positive integers;
/// at most one constraint exists per unordered variable pair, with
/// `(u, v, S)` and `(v, u, S^T)` identified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcspInstance {
    names: Vec<String>,
    domains: Vec<BTreeSet<u32>>,
    constraints: BTreeMap<(usize, usize), BTreeSet<(u32, u32)>>,
}

impl BcspInstance {
    pub fn new(names: Vec<String>, domains: Vec<BTreeSet<u32>>) -> BcspInstance {
        assert_eq!(names.len(), domains.len());
        for d in &domains {
            assert!(!d.contains(&0), "domain values must be positive");
        }
        BcspInstance { names, domains, constraints: BTreeMap::new() }
    }

    /// Installs the constraint for pair `{u, v}`, transposing when `u > v`.
    /// Replaces any previous constraint on the pair.
    pub fn set_constraint(&mut self, u: usize, v: usize, allowed: BTreeSet<(u32, u32)>) {
        assert_ne!(u, v, "constraints join distinct variables");
        let (key, pairs) = if u < v {
            ((u, v), allowed)
        } else {
            ((v, u), allowed.into_iter().map(|(a, b)| (b, a)).collect())
        };
        for &(a, b) in &pairs {
            assert!(self.domains[key.0].contains(&a) && self.domains[key.1].contains(&b));
        }
        self.constraints.insert(key, pairs);
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn domain(&self, v: usize) -> &BTreeSet<u32> {
        &self.domains[v]
    }

    pub fn d_max(&self) -> usize {
        self.domains.iter().map(|d| d.len()).max().unwrap_or(0)
    }

    pub fn constraints(&self) -> &BTreeMap<(usize, usize), BTreeSet<(u32, u32)>> {
        &self.constraints
    }

    /// Allowed pairs for the ordered pair `(u, v)`, if a constraint exists.
    pub fn allowed(&self, u: usize, v: usize) -> Option<BTreeSet<(u32, u32)>> {
        if u < v {
            self.constraints.get(&(u, v)).cloned()
        } else {
            self.constraints
                .get(&(v, u))
                .map(|s| s.iter().map(|&(a, b)| (b, a)).collect())
        }
    }

    pub fn primal_graph(&self) -> Graph {
        let edges: Vec<(usize, usize)> = self.constraints.keys().copied().collect();
        Graph::from_edges(self.num_vars(), &edges)
    }

    pub fn check_assignment(&self, w: &[u32]) -> bool {
        if w.len() != self.num_vars() {
            return false;
        }
        (0..w.len()).all(|v| self.domains[v].contains(&w[v]))
            && self
                .constraints
                .iter()
                .all(|(&(u, v), s)| s.contains(&(w[u], w[v])))
    }
}

/// Encodes an LHom instance as a BCSP: variables are instance vertices,
/// domains are list members shifted up by one, and each instance edge becomes
/// the constraint allowing exactly the target edges. A loop on an instance
/// vertex restricts its domain to looped target vertices.
pub fn lhom_to_bcsp(inst: &ListInstance) -> BcspInstance {
    let enc = |x: usize| (x + 1) as u32;
    let names = (0..inst.g.n()).map(|v| inst.g.label(v)).collect();
    let domains = (0..inst.g.n())
        .map(|v| {
            inst.lists[v]
                .iter()
                .filter(|&&x| !inst.g.has_loop(v) || inst.h.has_edge(x, x))
                .map(|&x| enc(x))
                .collect()
        })
        .collect();
    let mut b = BcspInstance::new(names, domains);
    for (u, v) in inst.g.edges() {
        if u == v {
            continue;
        }
        let mut allowed = BTreeSet::new();
        for &x in &inst.lists[u] {
            for &y in &inst.lists[v] {
                if inst.h.has_edge(x, y) {
                    allowed.insert((enc(x), enc(y)));
                }
            }
        }
        b.set_constraint(u, v, allowed);
    }
    b
}

/// Decodes a BCSP assignment produced from [`lhom_to_bcsp`] back to target
/// vertices.
pub fn decode_lhom_assignment(w: &[u32]) -> Vec<usize> {
    w.iter().map(|&a| (a - 1) as usize).collect()
}

/// The slot maps `σ_uv^(i): D_v -> D_u ∪ {0}` for every directed primal edge,
/// enumerating, for each value `a` of `v`, the values of `u` forbidden
/// against it. Unused slots hold the sentinel `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSlices {
    pub k: usize,
    /// Keyed by directed edge `(u, v)`; per value `a ∈ D_v` the `k` slots.
    pub sigma: BTreeMap<(usize, usize), BTreeMap<u32, Vec<u32>>>,
}

impl ConstraintSlices {
    /// Slot vector for `a` on directed edge `(u, v)`.
    pub fn slots(&self, u: usize, v: usize, a: u32) -> &[u32] {
        &self.sigma[&(u, v)][&a]
    }

    /// Reconstructs the forbidden set `{(b, a) : (b,a) ∉ S_c}` of a directed
    /// edge from the slices; the round trip must reproduce it exactly.
    pub fn forbidden_pairs(&self, u: usize, v: usize) -> BTreeSet<(u32, u32)> {
        let mut out = BTreeSet::new();
        for (&a, slots) in &self.sigma[&(u, v)] {
            for &b in slots.iter().filter(|&&b| b != 0) {
                out.insert((b, a));
            }
        }
        out
    }
}

/// Computes `K(I)` and fills the slot maps deterministically: for each value
/// the forbidden partners in ascending order, then sentinel zeros.
pub fn compute_k_and_slices(b: &BcspInstance) -> ConstraintSlices {
    let mut k = 0usize;
    let mut forb: BTreeMap<(usize, usize), BTreeMap<u32, Vec<u32>>> = BTreeMap::new();
    for (&(u, v), _) in b.constraints() {
        for (x, y) in [(u, v), (v, u)] {
            // Directed edge (x, y): for a ∈ D_y count b ∈ D_x with (b, a) ∉ S.
            let allowed = b.allowed(x, y).unwrap();
            let mut per_a = BTreeMap::new();
            for &a in b.domain(y) {
                let bad: Vec<u32> = b
                    .domain(x)
                    .iter()
                    .copied()
                    .filter(|&bb| !allowed.contains(&(bb, a)))
                    .collect();
                k = k.max(bad.len());
                per_a.insert(a, bad);
            }
            forb.insert((x, y), per_a);
        }
    }
    let sigma = forb
        .into_iter()
        .map(|(key, per_a)| {
            let padded = per_a
                .into_iter()
                .map(|(a, mut bad)| {
                    bad.resize(k, 0);
                    (a, bad)
                })
                .collect();
            (key, padded)
        })
        .collect();
    ConstraintSlices { k, sigma }
}

/// A validated DP-coloring cover of `g`: a cover graph plus the cluster map.
#[derive(Debug, Clone)]
pub struct DpCover {
    pub g: Graph,
    pub cover_h: Graph,
    pub clusters: Vec<BTreeSet<usize>>,
}

/// Validates cover conditions and encodes the instance as a BCSP whose
/// solutions are exactly the independent sets picking one cover vertex per
/// cluster. The matching condition makes `K(I) = 1` for every valid cover.
pub fn dp_cover_to_bcsp(
    g: &Graph,
    cover_h: &Graph,
    clusters: &[BTreeSet<usize>],
) -> Result<BcspInstance, InstanceError> {
    if clusters.len() != g.n() {
        return Err(InstanceError::InvalidCover {
            condition: 1,
            witness: "one cluster required per instance vertex".into(),
        });
    }
    // (1) clusters partition the cover graph's vertices.
    let mut owner = vec![None; cover_h.n()];
    for (v, cl) in clusters.iter().enumerate() {
        for &x in cl {
            if x >= cover_h.n() || owner[x].replace(v).is_some() {
                return Err(InstanceError::InvalidCover {
                    condition: 1,
                    witness: format!("cover vertex {x} not uniquely assigned"),
                });
            }
        }
    }
    if owner.iter().any(|o| o.is_none()) {
        return Err(InstanceError::InvalidCover {
            condition: 1,
            witness: "some cover vertex belongs to no cluster".into(),
        });
    }
    // (2) each cluster induces a clique.
    for (v, cl) in clusters.iter().enumerate() {
        for &x in cl {
            for &y in cl {
                if x < y && !cover_h.has_edge(x, y) {
                    return Err(InstanceError::InvalidCover {
                        condition: 2,
                        witness: format!("cluster of {v} misses edge {x}-{y}"),
                    });
                }
            }
        }
    }
    // (3) cross edges of instance edges form matchings; (4) no stray edges.
    for (x, y) in cover_h.edges() {
        if x == y {
            continue;
        }
        let (u, v) = (owner[x].unwrap(), owner[y].unwrap());
        if u != v && !g.has_edge(u, v) {
            return Err(InstanceError::InvalidCover {
                condition: 4,
                witness: format!("cover edge {x}-{y} joins non-adjacent clusters {u},{v}"),
            });
        }
    }
    for (u, v) in g.edges() {
        if u == v {
            continue;
        }
        for &x in &clusters[u] {
            let hits = clusters[v].iter().filter(|&&y| cover_h.has_edge(x, y)).count();
            if hits > 1 {
                return Err(InstanceError::InvalidCover {
                    condition: 3,
                    witness: format!("cover vertex {x} has {hits} edges into cluster of {v}"),
                });
            }
        }
        for &y in &clusters[v] {
            let hits = clusters[u].iter().filter(|&&x| cover_h.has_edge(x, y)).count();
            if hits > 1 {
                return Err(InstanceError::InvalidCover {
                    condition: 3,
                    witness: format!("cover vertex {y} has {hits} edges into cluster of {u}"),
                });
            }
        }
    }

    let enc = |x: usize| (x + 1) as u32;
    let names = (0..g.n()).map(|v| g.label(v)).collect();
    let domains = clusters.iter().map(|cl| cl.iter().map(|&x| enc(x)).collect()).collect();
    let mut b = BcspInstance::new(names, domains);
    for (u, v) in g.edges() {
        if u == v {
            continue;
        }
        let mut allowed = BTreeSet::new();
        for &x in &clusters[u] {
            for &y in &clusters[v] {
                if !cover_h.has_edge(x, y) {
                    allowed.insert((enc(x), enc(y)));
                }
            }
        }
        b.set_constraint(u, v, allowed);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, Graph};

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    /// Brute-force list-homomorphism enumeration, used as the oracle here.
    pub(crate) fn enumerate_lhom(inst: &ListInstance) -> Vec<Vec<usize>> {
        let n = inst.g.n();
        let mut out = Vec::new();
        let mut phi = vec![0usize; n];
        fn rec(inst: &ListInstance, v: usize, phi: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if v == inst.g.n() {
                out.push(phi.clone());
                return;
            }
            for &x in &inst.lists[v] {
                phi[v] = x;
                let ok = (0..=v).all(|u| !inst.g.has_edge(u, v) || inst.h.has_edge(phi[u], x));
                if ok {
                    rec(inst, v + 1, phi, out);
                }
            }
        }
        rec(inst, 0, &mut phi, &mut out);
        out
    }

    fn enumerate_bcsp(b: &BcspInstance) -> Vec<Vec<u32>> {
        let n = b.num_vars();
        let mut out = Vec::new();
        let mut w: Vec<u32> = Vec::new();
        fn rec(b: &BcspInstance, w: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            let v = w.len();
            if v == b.num_vars() {
                out.push(w.clone());
                return;
            }
            for &a in b.domain(v) {
                let ok = (0..v).all(|u| match b.allowed(u, v) {
                    Some(s) => s.contains(&(w[u], a)),
                    None => true,
                });
                if ok {
                    w.push(a);
                    rec(b, w, out);
                    w.pop();
                }
            }
        }
        let _ = n;
        rec(b, &mut w, &mut out);
        out
    }

    #[test]
    fn reject_non_bipartite_instance_graph() {
        let inst = ListInstance::full_lists(complete(3), cycle(6));
        let rep = normalize_consistent(&inst).unwrap();
        assert!(matches!(rep.status, ConsistencyStatus::Rejected(_)));
    }

    #[test]
    fn split_edge_instance_into_both_orientations() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = ListInstance::full_lists(g, cycle(6));
        let rep = normalize_consistent(&inst).unwrap();
        match rep.status {
            ConsistencyStatus::Split(pair) => {
                let (a, b) = *pair;
                // Orientation one: u in {even}, v in {odd}; the flip mirrors it.
                assert!(a.lists[0].iter().all(|&x| x % 2 == 0));
                assert!(a.lists[1].iter().all(|&x| x % 2 == 1));
                assert!(b.lists[0].iter().all(|&x| x % 2 == 1));
                assert!(b.lists[1].iter().all(|&x| x % 2 == 0));
                // Both sub-instances carry incomparable lists (fixpoint).
                for inst in [&a, &b] {
                    for l in &inst.lists {
                        let vals: Vec<usize> = l.iter().copied().collect();
                        for &x in &vals {
                            for &y in &vals {
                                if x != y {
                                    assert!(inst.h.incomparable(x, y));
                                }
                            }
                        }
                    }
                }
            }
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn domination_tie_removes_lower_index() {
        // Target: two vertices 0,1 with identical neighborhoods {2}.
        let h = Graph::from_edges(3, &[(0, 2), (1, 2)]);
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = ListInstance::new(g, h, vec![set(&[0, 1]), set(&[2])]);
        let rep = normalize_consistent(&inst).unwrap();
        match rep.status {
            ConsistencyStatus::Consistent(norm) => {
                assert_eq!(norm.lists[0], set(&[1]));
                assert!(rep.removed_dominated.contains(&(0, 0)));
            }
            other => panic!("expected consistent, got {other:?}"),
        }
    }

    #[test]
    fn normalize_requires_bipartite_target() {
        let inst = ListInstance::full_lists(cycle(4), complete(3));
        assert_eq!(normalize_consistent(&inst).unwrap_err(), InstanceError::TargetNotBipartite);
        let looped = Graph::from_edges(2, &[(0, 0), (0, 1)]);
        let inst = ListInstance::full_lists(cycle(4), looped);
        assert_eq!(normalize_consistent(&inst).unwrap_err(), InstanceError::TargetNotBipartite);
    }

    #[test]
    fn normalize_preserves_satisfiability_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for round in 0..200 {
            let hn = rng.gen_range(2..=8);
            let h = crate::gen::random_connected_bipartite(&mut rng, hn);
            let gn = rng.gen_range(1..=8);
            let g = crate::gen::random_connected_graph(&mut rng, gn, 0.4);
            let lists: Vec<BTreeSet<usize>> = (0..gn)
                .map(|_| (0..h.n()).filter(|_| rng.gen_bool(0.6)).collect())
                .collect();
            let inst = ListInstance::new(g, h, lists);
            let before = !enumerate_lhom(&inst).is_empty();
            let after = match normalize_consistent(&inst).unwrap().status {
                ConsistencyStatus::Rejected(_) => false,
                ConsistencyStatus::Consistent(a) => !enumerate_lhom(&a).is_empty(),
                ConsistencyStatus::Split(pair) => {
                    !enumerate_lhom(&pair.0).is_empty() || !enumerate_lhom(&pair.1).is_empty()
                }
            };
            assert_eq!(before, after, "satisfiability changed in round {round}");
        }
    }

    #[test]
    fn lhom_to_bcsp_k3_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = ListInstance::full_lists(g, complete(3));
        let b = lhom_to_bcsp(&inst);
        let allowed = b.allowed(0, 1).unwrap();
        assert_eq!(allowed.len(), 6);
        assert!(allowed.iter().all(|&(a, bb)| a != bb));
    }

    #[test]
    fn lhom_to_bcsp_keeps_empty_domains() {
        let g = Graph::from_edges(1, &[]);
        let inst = ListInstance::new(g, cycle(4), vec![set(&[])]);
        let b = lhom_to_bcsp(&inst);
        assert!(b.domain(0).is_empty());
    }

    #[test]
    fn lhom_to_bcsp_c6_singleton_lists() {
        // Edge u-v, L(u)={w1}, L(v)={w2,w4}; only w1-w2 is a C6 edge.
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = ListInstance::new(g, cycle(6), vec![set(&[0]), set(&[1, 3])]);
        let b = lhom_to_bcsp(&inst);
        assert_eq!(b.allowed(0, 1).unwrap(), [(1u32, 2u32)].into_iter().collect());
    }

    #[test]
    fn lhom_to_bcsp_preserves_solution_set() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let hn = rng.gen_range(1..=6);
            let h = crate::gen::random_graph(&mut rng, hn, 0.5, true);
            let gn = rng.gen_range(1..=6);
            let g = crate::gen::random_graph(&mut rng, gn, 0.5, false);
            let lists: Vec<BTreeSet<usize>> = (0..g.n())
                .map(|_| (0..h.n()).filter(|_| rng.gen_bool(0.7)).collect())
                .collect();
            let inst = ListInstance::new(g, h, lists);
            let direct: BTreeSet<Vec<usize>> = enumerate_lhom(&inst).into_iter().collect();
            let via_bcsp: BTreeSet<Vec<usize>> = enumerate_bcsp(&lhom_to_bcsp(&inst))
                .into_iter()
                .map(|w| decode_lhom_assignment(&w))
                .collect();
            assert_eq!(direct, via_bcsp);
        }
    }

    #[test]
    fn k_of_clique_targets_is_one() {
        for k in 3..=5 {
            let g = crate::gen::random_connected_graph(
                &mut rand::rngs::mock::StepRng::new(1, 7),
                4,
                0.9,
            );
            let inst = ListInstance::full_lists(g, complete(k));
            let b = lhom_to_bcsp(&inst);
            let slices = compute_k_and_slices(&b);
            // The only forbidden partner of a value is the value itself.
            assert_eq!(slices.k, 1);
        }
    }

    #[test]
    fn k_zero_with_all_allowing_constraint() {
        let mut b = BcspInstance::new(
            vec!["u".into(), "v".into()],
            vec![[1, 2].into_iter().collect(), [1, 2].into_iter().collect()],
        );
        let all: BTreeSet<(u32, u32)> =
            [1, 2].iter().flat_map(|&a| [1, 2].map(|b| (a, b))).collect();
        b.set_constraint(0, 1, all);
        assert_eq!(compute_k_and_slices(&b).k, 0);
    }

    #[test]
    fn slices_round_trip_reproduces_forbidden_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let nv = rng.gen_range(2..=6);
            let b = crate::gen::random_bcsp(&mut rng, nv, 4, 0.6);
            let slices = compute_k_and_slices(&b);
            for (&(u, v), _) in b.constraints() {
                for (x, y) in [(u, v), (v, u)] {
                    let allowed = b.allowed(x, y).unwrap();
                    let mut expected = BTreeSet::new();
                    for &a in b.domain(y) {
                        for &bb in b.domain(x) {
                            if !allowed.contains(&(bb, a)) {
                                expected.insert((bb, a));
                            }
                        }
                    }
                    assert_eq!(slices.forbidden_pairs(x, y), expected);
                    // No allowed pair is slotted, and slot counts fit K.
                    for (&a, slots) in &slices.sigma[&(x, y)] {
                        assert_eq!(slots.len(), slices.k);
                        for &bb in slots.iter().filter(|&&bb| bb != 0) {
                            assert!(!allowed.contains(&(bb, a)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dp_cover_rejects_non_matching() {
        // Two vertices joined by an edge; cover vertex 0 gets two edges into
        // the other cluster.
        let g = Graph::from_edges(2, &[(0, 1)]);
        let cover = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]);
        let clusters = vec![set(&[0]), set(&[1, 2])];
        match dp_cover_to_bcsp(&g, &cover, &clusters) {
            Err(InstanceError::InvalidCover { condition: 3, .. }) => {}
            other => panic!("expected condition-3 failure, got {other:?}"),
        }
    }

    #[test]
    fn dp_cover_rejects_non_clique_cluster() {
        let g = Graph::from_edges(1, &[]);
        let cover = Graph::from_edges(2, &[]);
        let clusters = vec![set(&[0, 1])];
        match dp_cover_to_bcsp(&g, &cover, &clusters) {
            Err(InstanceError::InvalidCover { condition: 2, .. }) => {}
            other => panic!("expected condition-2 failure, got {other:?}"),
        }
    }

    #[test]
    fn dp_cover_of_list_coloring_matches_lhom_encoding() {
        // List-3-coloring of an edge with lists {0,1} and {1,2}: build the
        // classic cover and compare solution counts with the LHom encoding.
        let g = Graph::from_edges(2, &[(0, 1)]);
        // Cover graph: cluster {a0,a1} for u, {b1,b2} for v; cliques inside,
        // equal colors joined across.
        let cover = Graph::from_edges(4, &[(0, 1), (2, 3), (1, 2)]);
        let clusters = vec![set(&[0, 1]), set(&[2, 3])];
        let b = dp_cover_to_bcsp(&g, &cover, &clusters).unwrap();
        assert_eq!(compute_k_and_slices(&b).k, 1);
        let cover_solutions = enumerate_bcsp(&b).len();

        let h = complete(3);
        let inst = ListInstance::new(
            Graph::from_edges(2, &[(0, 1)]),
            h,
            vec![set(&[0, 1]), set(&[1, 2])],
        );
        let lhom_solutions = enumerate_lhom(&inst).len();
        assert_eq!(cover_solutions, lhom_solutions);
    }

    #[test]
    fn valid_random_covers_have_k_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let (g, cover, clusters) = crate::gen::random_dp_cover(&mut rng, n);
            let b = dp_cover_to_bcsp(&g, &cover, &clusters).expect("generated cover is valid");
            assert!(compute_k_and_slices(&b).k <= 1);
        }
    }
}
