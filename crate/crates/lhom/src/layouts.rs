//! Linear layouts, exact cutwidth and feedback vertex sets for small graphs,
//! and the conversions layout -> path decomposition and FVS -> tree
//! decomposition.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("graph has {n} vertices, above the exact-search cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("layout is not a permutation of the graph's vertices")]
    InvalidLayout,
}

pub const DEFAULT_CUTWIDTH_CAP: usize = 20;
pub const DEFAULT_FVS_CAP: usize = 25;

/// A vertex ordering together with its exactly recomputed width: the maximum
/// number of edges crossing any prefix cut. Loops never cross a cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearLayout {
    pub order: Vec<usize>,
    pub width: usize,
}

impl LinearLayout {
    /// Wraps an ordering, recomputing the width; errors unless `order` is a
    /// permutation of the vertices of `g`.
    pub fn new(g: &Graph, order: Vec<usize>) -> Result<LinearLayout, LayoutError> {
        let width = layout_width(g, &order).ok_or(LayoutError::InvalidLayout)?;
        Ok(LinearLayout { order, width })
    }
}

/// Exact width of an ordering, `None` if it is not a permutation.
pub fn layout_width(g: &Graph, order: &[usize]) -> Option<usize> {
    if order.len() != g.n() {
        return None;
    }
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in order.iter().enumerate() {
        if v >= g.n() || pos[v] != usize::MAX {
            return None;
        }
        pos[v] = i;
    }
    if g.n() == 0 {
        return Some(0);
    }
    // diff[i] counts edges crossing the cut between positions i and i+1.
    let mut diff = vec![0i64; g.n() + 1];
    for (u, v) in g.edges() {
        if u == v {
            continue;
        }
        let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
        diff[a] += 1;
        diff[b] -= 1;
    }
    let mut cur = 0i64;
    let mut best = 0i64;
    for d in &diff[..g.n()] {
        cur += d;
        best = best.max(cur);
    }
    Some(best as usize)
}

/// Minimum-width layout by dynamic programming over placed-prefix subsets.
/// Ties during reconstruction are broken toward the lexicographically
/// smallest next vertex, so the output is reproducible.
pub fn exact_cutwidth(g: &Graph, cap: usize) -> Result<LinearLayout, LayoutError> {
    let n = g.n();
    if n > cap || n > 26 {
        return Err(LayoutError::SizeCapExceeded { n, cap: cap.min(26) });
    }
    if n == 0 {
        return Ok(LinearLayout { order: Vec::new(), width: 0 });
    }
    let full: u32 = (1u32 << n) - 1;
    let nbr: Vec<u32> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .filter(|&&w| w != v)
                .fold(0u32, |m, &w| m | 1 << w)
        })
        .collect();
    // cut[s] = edges from s to its complement; best[s] = minimal max-cut over
    // orders of s.
    let mut cut = vec![0u32; 1 << n];
    let mut best = vec![u32::MAX; 1 << n];
    best[0] = 0;
    for s in 1u32..=full {
        let v = s.trailing_zeros() as usize;
        let prev = s & !(1 << v);
        let inside = (nbr[v] & prev).count_ones();
        let outside = (nbr[v] & !prev).count_ones();
        cut[s as usize] = cut[prev as usize] - inside + outside;
        let mut t = s;
        while t != 0 {
            let v = t.trailing_zeros() as usize;
            t &= t - 1;
            let p = (s & !(1 << v)) as usize;
            if best[p] != u32::MAX {
                best[s as usize] = best[s as usize].min(best[p].max(cut[s as usize]));
            }
        }
    }
    // Reconstruct forward: at each step append the smallest vertex whose
    // placement still completes within the optimum.
    let width = best[full as usize];
    let mut memo: Vec<Option<bool>> = vec![None; 1 << n];
    let mut order = Vec::with_capacity(n);
    let mut placed = 0u32;
    for _ in 0..n {
        for v in 0..n {
            if placed >> v & 1 == 1 {
                continue;
            }
            let s = placed | 1 << v;
            if feasible_completion(&cut, s, full, width, &mut memo) {
                order.push(v);
                placed = s;
                break;
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    Ok(LinearLayout { order, width: width as usize })
}

/// Can the placement `s` be completed to `full` with every intermediate cut
/// at most `width`? Memoized over subsets.
fn feasible_completion(
    cut: &[u32],
    s: u32,
    full: u32,
    width: u32,
    memo: &mut Vec<Option<bool>>,
) -> bool {
    if cut[s as usize] > width {
        return false;
    }
    if s == full {
        return true;
    }
    if let Some(ans) = memo[s as usize] {
        return ans;
    }
    let mut rest = full & !s;
    let mut ok = false;
    while rest != 0 {
        let v = rest.trailing_zeros();
        rest &= rest - 1;
        if feasible_completion(cut, s | 1 << v, full, width, memo) {
            ok = true;
            break;
        }
    }
    memo[s as usize] = Some(ok);
    ok
}

/// Heuristic layout by iterative minimum-cut growth: repeatedly append the
/// candidate (a neighbor of the prefix when one exists) whose placement
/// minimizes the new cut, lowest index on ties. Width recomputed exactly.
pub fn greedy_layout(g: &Graph) -> LinearLayout {
    let n = g.n();
    if n == 0 {
        return LinearLayout { order: Vec::new(), width: 0 };
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // Outgoing-edge count per candidate if placed next.
    let start = (0..n).min_by_key(|&v| (g.degree(v), v)).unwrap();
    order.push(start);
    placed[start] = true;
    let mut cut: i64 = g.neighbors(start).iter().filter(|&&w| w != start).count() as i64;
    for _ in 1..n {
        let mut frontier: Vec<usize> = (0..n)
            .filter(|&v| !placed[v] && g.neighbors(v).iter().any(|&w| placed[w]))
            .collect();
        if frontier.is_empty() {
            frontier = (0..n).filter(|&v| !placed[v]).collect();
        }
        let next = frontier
            .into_iter()
            .min_by_key(|&v| {
                let into: i64 =
                    g.neighbors(v).iter().filter(|&&w| w != v && placed[w]).count() as i64;
                let out: i64 =
                    g.neighbors(v).iter().filter(|&&w| w != v && !placed[w]).count() as i64;
                (cut - into + out, v as i64)
            })
            .unwrap();
        let into = g.neighbors(next).iter().filter(|&&w| w != next && placed[w]).count() as i64;
        let out = g.neighbors(next).iter().filter(|&&w| w != next && !placed[w]).count() as i64;
        cut = cut - into + out;
        order.push(next);
        placed[next] = true;
    }
    let width = layout_width(g, &order).unwrap();
    LinearLayout { order, width }
}

/// A verified feedback vertex set: deleting it leaves a forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackSet {
    pub vertices: BTreeSet<usize>,
}

impl FeedbackSet {
    pub fn verify(&self, g: &Graph) -> bool {
        let rest: Vec<usize> =
            (0..g.n()).filter(|v| !self.vertices.contains(v)).collect();
        let (sub, _) = g.induced(&rest);
        sub.is_forest()
    }
}

/// Finds a shortest cycle (as a vertex list) or `None` for forests.
fn find_cycle(g: &Graph) -> Option<Vec<usize>> {
    for v in 0..g.n() {
        if g.has_loop(v) {
            return Some(vec![v]);
        }
    }
    // BFS from each vertex; first closing edge gives a short cycle.
    let mut best: Option<Vec<usize>> = None;
    for s in 0..g.n() {
        let mut parent = vec![usize::MAX; g.n()];
        let mut dist = vec![usize::MAX; g.n()];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w && parent[w] != u {
                    let mut pu = vec![u];
                    while *pu.last().unwrap() != s {
                        pu.push(parent[*pu.last().unwrap()]);
                    }
                    let mut pw = vec![w];
                    while *pw.last().unwrap() != s {
                        pw.push(parent[*pw.last().unwrap()]);
                    }
                    // Merge at the deepest common ancestor.
                    let set: BTreeSet<usize> = pu.iter().copied().collect();
                    if let Some(pos) = pw.iter().position(|x| set.contains(x)) {
                        let anchor = pw[pos];
                        let cut = pu.iter().position(|&x| x == anchor).unwrap();
                        let mut cyc: Vec<usize> = pu[..=cut].to_vec();
                        let mut back: Vec<usize> = pw[..pos].to_vec();
                        back.reverse();
                        cyc.extend(back);
                        if best.as_ref().map_or(true, |b| cyc.len() < b.len()) {
                            best = Some(cyc);
                        }
                    }
                }
            }
        }
        if best.as_deref().is_some_and(|b| b.len() <= 3) {
            break;
        }
    }
    best
}

/// Minimum feedback vertex set by branching on the vertices of a found cycle,
/// bounded by the incumbent. Loops force their vertex into every solution.
pub fn exact_fvs(g: &Graph, cap: usize) -> Result<FeedbackSet, LayoutError> {
    if g.n() > cap {
        return Err(LayoutError::SizeCapExceeded { n: g.n(), cap });
    }
    fn search(g: &Graph, chosen: &mut BTreeSet<usize>, best: &mut Option<BTreeSet<usize>>) {
        if let Some(b) = best {
            if chosen.len() >= b.len() {
                return;
            }
        }
        let rest: Vec<usize> = (0..g.n()).filter(|v| !chosen.contains(v)).collect();
        let (sub, map) = g.induced(&rest);
        match find_cycle(&sub) {
            None => *best = Some(chosen.clone()),
            Some(cyc) => {
                for local in cyc {
                    let v = map[local];
                    chosen.insert(v);
                    search(g, chosen, best);
                    chosen.remove(&v);
                }
            }
        }
    }
    let mut best = None;
    search(g, &mut BTreeSet::new(), &mut best);
    Ok(FeedbackSet { vertices: best.unwrap() })
}

/// A tree decomposition: a tree, one bag per tree node, and the width
/// `max |bag| - 1` (0 for the empty decomposition).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub tree: Graph,
    pub bags: Vec<BTreeSet<usize>>,
    pub width: usize,
}

impl TreeDecomposition {
    pub fn compute_width(bags: &[BTreeSet<usize>]) -> usize {
        bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks all decomposition conditions against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        if self.bags.len() != self.tree.n() {
            return Err("bag count differs from tree size".into());
        }
        if self.tree.n() > 0 && (!self.tree.is_connected() || !self.tree.is_forest()) {
            return Err("decomposition tree is not a tree".into());
        }
        if self.width != Self::compute_width(&self.bags) {
            return Err("stored width differs from recomputed width".into());
        }
        for v in 0..g.n() {
            let occ: Vec<usize> =
                (0..self.bags.len()).filter(|&t| self.bags[t].contains(&v)).collect();
            if occ.is_empty() {
                return Err(format!("vertex {v} appears in no bag"));
            }
            let (sub, _) = self.tree.induced(&occ);
            if !sub.is_connected() {
                return Err(format!("occurrence set of vertex {v} is disconnected"));
            }
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(format!("edge {u}-{v} is covered by no bag"));
            }
        }
        Ok(())
    }
}

/// Builds a tree decomposition of width at most `|F| + 1` from a verified
/// feedback vertex set: a width-1 decomposition of the remaining forest with
/// `F` added to every bag.
pub fn fvs_to_tree_decomposition(g: &Graph, f: &FeedbackSet) -> TreeDecomposition {
    assert!(f.verify(g), "feedback set does not verify");
    let rest: Vec<usize> = (0..g.n()).filter(|v| !f.vertices.contains(v)).collect();
    let (forest, map) = g.induced(&rest);
    let mut bags: Vec<BTreeSet<usize>> = Vec::new();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    let mut bag_of = vec![usize::MAX; forest.n()];
    // One bag per forest vertex holding {v, parent(v)}; roots chain the
    // components together.
    let mut prev_root_bag: Option<usize> = None;
    for comp in forest.connected_components() {
        let root = comp[0];
        let mut stack = vec![(root, usize::MAX)];
        let mut seen = vec![false; forest.n()];
        seen[root] = true;
        while let Some((v, parent)) = stack.pop() {
            let mut bag: BTreeSet<usize> = f.vertices.clone();
            bag.insert(map[v]);
            if parent != usize::MAX {
                bag.insert(map[parent]);
            }
            let id = bags.len();
            bags.push(bag);
            bag_of[v] = id;
            if parent != usize::MAX {
                tree_edges.push((bag_of[parent], id));
            } else if let Some(prev) = prev_root_bag {
                tree_edges.push((prev, id));
            }
            if parent == usize::MAX {
                prev_root_bag = Some(id);
            }
            for &w in forest.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, v));
                }
            }
        }
    }
    if bags.is_empty() {
        bags.push(f.vertices.clone());
    }
    let tree = Graph::from_edges(bags.len(), &tree_edges);
    let width = TreeDecomposition::compute_width(&bags);
    TreeDecomposition { tree, bags, width }
}

/// Builds a path-shaped decomposition of width at most the layout width: the
/// bag at cut `p` holds the left endpoints of crossing edges plus the next
/// vertex in the order.
pub fn layout_to_path_decomposition(g: &Graph, l: &LinearLayout) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition {
            tree: Graph::from_edges(1, &[]),
            bags: vec![BTreeSet::new()],
            width: 0,
        };
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in l.order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags = Vec::with_capacity(n);
    for p in 0..n {
        let mut bag = BTreeSet::new();
        bag.insert(l.order[p]);
        for (u, v) in g.edges() {
            if u == v {
                continue;
            }
            let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
            // Edge crosses the cut between positions p-1 and p.
            if a < p && b >= p {
                bag.insert(if pos[u] < pos[v] { u } else { v });
            }
        }
        bags.push(bag);
    }
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let tree = Graph::from_edges(n, &edges);
    let width = TreeDecomposition::compute_width(&bags);
    TreeDecomposition { tree, bags, width }
}

/// Exposes the per-cut boundary data of a layout; shared by the solvers.
#[derive(Debug, Clone)]
pub struct BoundarySets {
    /// For each step `i` (1-based prefix length), the boundary variables
    /// `X_i`: placed vertices with a neighbor placed later.
    pub x: Vec<Vec<usize>>,
    /// Crossing-edge degree per boundary vertex at each step, aligned with
    /// `x`.
    pub deg: Vec<BTreeMap<usize, usize>>,
}

/// Computes boundary sets and crossing degrees for every prefix of `order`.
pub fn boundary_sets(g: &Graph, order: &[usize]) -> BoundarySets {
    let n = order.len();
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut x = Vec::with_capacity(n);
    let mut deg = Vec::with_capacity(n);
    for i in 1..=n {
        let mut xi = Vec::new();
        let mut di = BTreeMap::new();
        for &u in &order[..i] {
            let later = g
                .neighbors(u)
                .iter()
                .filter(|&&w| w != u && pos[w] >= i)
                .count();
            if later > 0 {
                xi.push(u);
                di.insert(u, later);
            }
        }
        xi.sort_unstable();
        x.push(xi);
        deg.push(di);
    }
    BoundarySets { x, deg }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force minimum width over all orders; oracle for small graphs.
    fn brute_force_cutwidth(g: &Graph) -> usize {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for i in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        perms(g.n())
            .into_iter()
            .map(|p| layout_width(g, &p).unwrap())
            .min()
            .unwrap_or(0)
    }

    #[test]
    fn path_in_path_order_has_width_one() {
        let g = path(4);
        let l = LinearLayout::new(&g, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(l.width, 1);
    }

    #[test]
    fn exact_cutwidth_matches_brute_force_on_named_graphs() {
        let k3 = complete(3);
        assert_eq!(brute_force_cutwidth(&k3), 2);
        assert_eq!(exact_cutwidth(&k3, 20).unwrap().width, 2);

        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(brute_force_cutwidth(&star), 2);
        assert_eq!(exact_cutwidth(&star, 20).unwrap().width, 2);
    }

    #[test]
    fn exact_cutwidth_matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let g = crate::gen::random_graph(&mut rng, 6, 0.45, false);
            let exact = exact_cutwidth(&g, 20).unwrap();
            assert_eq!(exact.width, brute_force_cutwidth(&g));
            assert_eq!(layout_width(&g, &exact.order).unwrap(), exact.width);
        }
    }

    #[test]
    fn exact_cutwidth_is_deterministic_and_respects_cap() {
        let g = cycle(6);
        let a = exact_cutwidth(&g, 20).unwrap();
        let b = exact_cutwidth(&g, 20).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            exact_cutwidth(&crate::gen::random_graph(
                &mut ChaCha8Rng::seed_from_u64(0),
                21,
                0.2,
                false
            ), 20),
            Err(LayoutError::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn cutwidth_at_least_half_max_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..40 {
            let g = crate::gen::random_graph(&mut rng, 7, 0.5, false);
            let w = exact_cutwidth(&g, 20).unwrap().width;
            assert!(2 * w >= g.max_degree());
        }
    }

    #[test]
    fn greedy_layout_examples() {
        assert_eq!(greedy_layout(&Graph::from_edges(0, &[])).width, 0);
        let c6 = cycle(6);
        let l = greedy_layout(&c6);
        assert!(l.width <= 2, "greedy should reach the optimum on C6");
        assert_eq!(layout_width(&c6, &l.order).unwrap(), l.width);
    }

    #[test]
    fn greedy_layout_on_small_trees_stays_within_max_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let g = crate::gen::random_tree(&mut rng, 10);
            let l = greedy_layout(&g);
            assert!(
                l.width <= g.max_degree().max(1),
                "greedy width {} above max degree {}",
                l.width,
                g.max_degree()
            );
        }
    }

    #[test]
    fn exact_fvs_examples() {
        assert!(exact_fvs(&path(6), 25).unwrap().vertices.is_empty());
        let c5 = cycle(5);
        let f = exact_fvs(&c5, 25).unwrap();
        assert_eq!(f.vertices.len(), 1);
        assert!(f.verify(&c5));
        // K4: no single vertex works, some pair does.
        let k4 = complete(4);
        for v in 0..4 {
            let f1 = FeedbackSet { vertices: [v].into_iter().collect() };
            assert!(!f1.verify(&k4));
        }
        let f = exact_fvs(&k4, 25).unwrap();
        assert_eq!(f.vertices.len(), 2);
        assert!(f.verify(&k4));
    }

    #[test]
    fn exact_fvs_matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let g = crate::gen::random_graph(&mut rng, 7, 0.4, true);
            let f = exact_fvs(&g, 25).unwrap();
            assert!(f.verify(&g));
            let brute = (0u32..1 << g.n())
                .filter(|s| {
                    let set: BTreeSet<usize> =
                        (0..g.n()).filter(|&v| s >> v & 1 == 1).collect();
                    FeedbackSet { vertices: set }.verify(&g)
                })
                .map(|s| s.count_ones() as usize)
                .min()
                .unwrap();
            assert_eq!(f.vertices.len(), brute);
        }
    }

    #[test]
    fn fvs_decomposition_bounds_and_validates() {
        let c5 = cycle(5);
        let f = FeedbackSet { vertices: [0].into_iter().collect() };
        let td = fvs_to_tree_decomposition(&c5, &f);
        assert!(td.width <= 2);
        td.validate(&c5).unwrap();

        let k4 = complete(4);
        let f = exact_fvs(&k4, 25).unwrap();
        let td = fvs_to_tree_decomposition(&k4, &f);
        assert!(td.width <= 3);
        td.validate(&k4).unwrap();

        let forest = path(5);
        let td = fvs_to_tree_decomposition(&forest, &FeedbackSet { vertices: BTreeSet::new() });
        assert!(td.width <= 1);
        td.validate(&forest).unwrap();
    }

    #[test]
    fn path_decomposition_bounds_and_validates() {
        for (g, expect) in [(path(4), 1usize), (cycle(6), 2), (complete(4), 3)] {
            let l = exact_cutwidth(&g, 20).unwrap();
            let td = layout_to_path_decomposition(&g, &l);
            assert!(td.width <= l.width.max(expect));
            assert!(td.width <= l.width);
            td.validate(&g).unwrap();
        }
    }

    #[test]
    fn decompositions_validate_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..50 {
            let g = crate::gen::random_graph(&mut rng, 9, 0.35, false);
            let f = exact_fvs(&g, 25).unwrap();
            let td = fvs_to_tree_decomposition(&g, &f);
            assert!(td.width <= f.vertices.len() + 1);
            td.validate(&g).unwrap();

            let l = greedy_layout(&g);
            let pd = layout_to_path_decomposition(&g, &l);
            assert!(pd.width <= l.width);
            pd.validate(&g).unwrap();
        }
    }

    #[test]
    fn boundary_sets_are_monotone() {
        let g = cycle(6);
        let order: Vec<usize> = vec![0, 1, 2, 3, 4, 5];
        let b = boundary_sets(&g, &order);
        for i in 1..g.n() {
            let prev: BTreeSet<usize> = b.x[i - 1].iter().copied().collect();
            for &u in &b.x[i] {
                assert!(prev.contains(&u) || u == order[i]);
            }
        }
    }
}
