//! Seeded random generators for graphs, BCSP instances, DP-coloring covers,
//! and CNF formulas. Every generator is deterministic in the supplied RNG, so
//! a seed fully determines the produced objects.

use std::collections::BTreeSet;

use rand::Rng;

use crate::graph::Graph;
use crate::instance::BcspInstance;

/// Random graph on `n` vertices with edge probability `p`; loops allowed when
/// `loops` is set (with halved probability).
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, loops: bool) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            if u == v {
                if loops && rng.gen_bool(p / 2.0) {
                    edges.push((u, v));
                }
            } else if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random connected loopless graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra_p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(extra_p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random tree on `n` vertices.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Graph {
    random_connected_graph(rng, n, 0.0)
}

/// Random connected bipartite graph with `n` vertices split into two classes.
pub fn random_connected_bipartite<R: Rng>(rng: &mut R, n: usize) -> Graph {
    assert!(n >= 1);
    if n == 1 {
        return Graph::from_edges(1, &[]);
    }
    let a = rng.gen_range(1..n);
    // Connect alternately side-to-side, then sprinkle cross edges.
    let mut edges = Vec::new();
    for v in 1..n {
        let (lo, hi) = if v < a { (a, n) } else { (0, a) };
        let prev_range = lo..hi.min(if v < a { n } else { v });
        let candidates: Vec<usize> = prev_range.filter(|&u| u < v || v < a).collect();
        if candidates.is_empty() {
            continue;
        }
        let u = candidates[rng.gen_range(0..candidates.len())];
        edges.push((u.min(v), u.max(v)));
    }
    for u in 0..a {
        for v in a..n {
            if rng.gen_bool(0.4) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges(n, &edges);
    if g.is_connected() && g.is_bipartite() {
        g
    } else {
        // Rare misfire of the sampling above; patch connectivity with a star
        // into side A through side B.
        let mut edges = g.edges();
        for v in a..n {
            edges.push((0, v));
        }
        if a > 1 && n > a {
            for u in 1..a {
                edges.push((u, a));
            }
        }
        Graph::from_edges(n, &edges)
    }
}

/// Random connected non-bipartite graph on `n >= 3` vertices, loops allowed
/// with probability `loop_p` per vertex.
pub fn random_connected_nonbipartite<R: Rng>(rng: &mut R, n: usize, loop_p: f64) -> Graph {
    assert!(n >= 3);
    loop {
        let base = random_connected_graph(rng, n, 0.4);
        let mut edges = base.edges();
        for v in 0..n {
            if rng.gen_bool(loop_p) {
                edges.push((v, v));
            }
        }
        let g = Graph::from_edges(n, &edges);
        if !g.is_bipartite() {
            return g;
        }
        // Close an odd cycle explicitly.
        let b = g.bipartition().unwrap();
        let class = if b.class_x.len() >= 2 { b.class_x.clone() } else { b.class_y.clone() };
        if class.len() >= 2 {
            let mut edges = g.edges();
            edges.push((class[0], class[1]));
            return Graph::from_edges(n, &edges);
        }
    }
}

/// Random BCSP instance: `n` variables, domain sizes in `1..=d_max` over the
/// value range `1..=d_max`, one constraint per pair with probability
/// `density`, each allowed set a random subset of the domain product.
pub fn random_bcsp<R: Rng>(rng: &mut R, n: usize, d_max: u32, density: f64) -> BcspInstance {
    let names = (0..n).map(|v| format!("v{v}")).collect();
    let domains: Vec<BTreeSet<u32>> = (0..n)
        .map(|_| {
            let size = rng.gen_range(1..=d_max);
            let mut d = BTreeSet::new();
            while d.len() < size as usize {
                d.insert(rng.gen_range(1..=d_max));
            }
            d
        })
        .collect();
    let mut b = BcspInstance::new(names, domains.clone());
    for u in 0..n {
        for v in u + 1..n {
            if !rng.gen_bool(density) {
                continue;
            }
            let mut allowed = BTreeSet::new();
            for &x in &domains[u] {
                for &y in &domains[v] {
                    if rng.gen_bool(0.65) {
                        allowed.insert((x, y));
                    }
                }
            }
            b.set_constraint(u, v, allowed);
        }
    }
    b
}

/// Random DP-coloring cover of a random connected graph on `n` vertices:
/// clusters of size 1..=3 induced as cliques, a random partial matching
/// across every instance edge.
pub fn random_dp_cover<R: Rng>(
    rng: &mut R,
    n: usize,
) -> (Graph, Graph, Vec<BTreeSet<usize>>) {
    let g = random_connected_graph(rng, n, 0.35);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut clusters: Vec<BTreeSet<usize>> = Vec::new();
    let mut next = 0usize;
    for &s in &sizes {
        clusters.push((next..next + s).collect());
        next += s;
    }
    let mut edges = Vec::new();
    for cl in &clusters {
        let vs: Vec<usize> = cl.iter().copied().collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                edges.push((vs[i], vs[j]));
            }
        }
    }
    for (u, v) in g.edges() {
        // Random partial matching between the two clusters.
        let mut left: Vec<usize> = clusters[u].iter().copied().collect();
        let mut right: Vec<usize> = clusters[v].iter().copied().collect();
        while !left.is_empty() && !right.is_empty() && rng.gen_bool(0.7) {
            let x = left.swap_remove(rng.gen_range(0..left.len()));
            let y = right.swap_remove(rng.gen_range(0..right.len()));
            edges.push((x, y));
        }
    }
    (g, Graph::from_edges(next, &edges), clusters)
}

/// A CNF formula in DIMACS conventions: variables `1..=num_vars`, clauses as
/// non-empty literal lists (positive or negative variable indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize - 1;
                if lit > 0 {
                    assignment[v]
                } else {
                    !assignment[v]
                }
            })
        })
    }

    /// Exhaustive satisfiability check; the oracle for reduction round trips.
    pub fn brute_force_sat(&self) -> Option<Vec<bool>> {
        let n = self.num_vars;
        assert!(n <= 24, "brute-force CNF oracle is for small formulas");
        for bits in 0u64..(1u64 << n) {
            let assignment: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            if self.evaluate(&assignment) {
                return Some(assignment);
            }
        }
        None
    }
}

/// Random CNF with `n` variables and `m` clauses of width 1..=3, duplicate
/// variables within a clause avoided.
pub fn random_cnf<R: Rng>(rng: &mut R, n: usize, m: usize) -> Cnf {
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let width = rng.gen_range(1..=3usize.min(n));
        let mut vars = BTreeSet::new();
        while vars.len() < width {
            vars.insert(rng.gen_range(1..=n));
        }
        let clause = vars
            .into_iter()
            .map(|v| if rng.gen_bool(0.5) { v as i32 } else { -(v as i32) })
            .collect();
        clauses.push(clause);
    }
    Cnf { num_vars: n, clauses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_seed_deterministic() {
        let g1 = random_connected_graph(&mut ChaCha8Rng::seed_from_u64(42), 8, 0.3);
        let g2 = random_connected_graph(&mut ChaCha8Rng::seed_from_u64(42), 8, 0.3);
        assert_eq!(g1, g2);
        let b1 = random_bcsp(&mut ChaCha8Rng::seed_from_u64(9), 6, 4, 0.5);
        let b2 = random_bcsp(&mut ChaCha8Rng::seed_from_u64(9), 6, 4, 0.5);
        assert_eq!(b1, b2);
    }

    #[test]
    fn bipartite_generator_output_is_connected_bipartite() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=9 {
            for _ in 0..20 {
                let g = random_connected_bipartite(&mut rng, n);
                assert!(g.is_connected());
                assert!(g.is_bipartite());
            }
        }
    }

    #[test]
    fn nonbipartite_generator_output_is_connected_nonbipartite() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let g = random_connected_nonbipartite(&mut rng, 5, 0.2);
            assert!(g.is_connected());
            assert!(!g.is_bipartite());
        }
    }

    #[test]
    fn cnf_brute_force_finds_witness() {
        let cnf = Cnf { num_vars: 2, clauses: vec![vec![1, 2], vec![-1], vec![2]] };
        let w = cnf.brute_force_sat().unwrap();
        assert!(cnf.evaluate(&w));
        let unsat = Cnf { num_vars: 1, clauses: vec![vec![1], vec![-1]] };
        assert!(unsat.brute_force_sat().is_none());
    }
}
