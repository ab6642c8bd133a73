//! Decision engines for BCSP and list-homomorphism instances.
//!
//! Four routes: exhaustive backtracking, a plain boundary-assignment dynamic
//! program over a linear layout, the rank-reduced representative-set sweep,
//! and the paired sweep for non-bipartite targets that walks the associated
//! bipartite instance and admits only consistently paired colorings. A
//! feedback-set engine (branch over the set, then arc consistency on the
//! remaining forest) rounds out the toolbox and is what the reduction
//! round-trip checks use.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::Graph;
use crate::instance::{compute_k_and_slices, BcspInstance, ConstraintSlices, ListInstance};
use crate::layouts::{boundary_sets, LinearLayout};

/// Default field modulus: a prime far above any domain value in scope.
pub const DEFAULT_PRIME: u64 = (1 << 31) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("search space of {0} assignments exceeds the budget")]
    BudgetExceeded(u128),
    #[error("layout is not a permutation of the primal graph's vertices")]
    NoLayout,
    #[error("field modulus {p} does not exceed the maximum domain value {dmax}")]
    DegenerateField { p: u64, dmax: u64 },
    #[error("target graph is bipartite; use the direct representative-set route")]
    TargetBipartite,
    #[error("target graph is not a reflexive clique plus an independent set")]
    NotStrongSplit,
    #[error("adjacent instance vertices both carry independent-side lists")]
    StrongSplitNoInstance,
    #[error("reduction matrix would have {0} columns; instance too wide")]
    ReduceTooLarge(u128),
    #[error("feedback set does not verify (deleting it leaves a cycle)")]
    BadFeedbackSet,
}

/// Per-step table statistics of a representative-set sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepStat {
    /// Table size after extension, before rank reduction.
    pub extended: usize,
    /// Table size after rank reduction.
    pub reduced: usize,
    /// Product bound `prod (deg+1)^K` at this step.
    pub product_bound: u128,
    /// `2^(K * width)` bound.
    pub power_bound: u128,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub max_table_size: usize,
    pub steps: Vec<StepStat>,
    pub bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub satisfiable: bool,
    /// One satisfying assignment when available (value per variable).
    pub assignment: Option<Vec<u32>>,
    pub stats: SolveStats,
}

impl SolveResult {
    fn no() -> SolveResult {
        SolveResult { satisfiable: false, assignment: None, stats: SolveStats::default() }
    }
}

// ---------------------------------------------------------------------------
// Prime-field helpers
// ---------------------------------------------------------------------------

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn mod_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, a, p);
        }
        a = mod_mul(a, a, p);
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

/// Indices of a row basis of `rows`, computed by Gaussian elimination over
/// `F_p` with first-nonzero pivoting. Rows are processed in order, so the
/// kept subset is deterministic.
pub fn row_basis_indices(rows: &[Vec<u64>], p: u64) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new(); // (pivot column, reduced row)
    let mut kept = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (pc, b) in &basis {
            if r[*pc] != 0 {
                let factor = r[*pc];
                for (x, y) in r.iter_mut().zip(b) {
                    *x = (*x + p - mod_mul(factor, *y, p)) % p;
                }
            }
        }
        if let Some(pc) = r.iter().position(|&x| x != 0) {
            let inv = mod_inv(r[pc], p);
            for x in r.iter_mut() {
                *x = mod_mul(*x, inv, p);
            }
            basis.push((pc, r));
            kept.push(idx);
        }
    }
    kept
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

pub const DEFAULT_BRUTE_BUDGET: u128 = 200_000_000;

/// Exhaustive backtracking with forward checking. Errors when the assignment
/// space exceeds `budget`.
pub fn brute_force(b: &BcspInstance, budget: u128) -> Result<SolveResult, SolveError> {
    let n = b.num_vars();
    let space: u128 = (0..n).map(|v| b.domain(v).len() as u128).fold(1u128, |a, x| {
        a.saturating_mul(x.max(1))
    });
    if space > budget {
        return Err(SolveError::BudgetExceeded(space));
    }
    if (0..n).any(|v| b.domain(v).is_empty()) {
        return Ok(SolveResult::no());
    }
    let mut domains: Vec<Vec<u32>> = (0..n).map(|v| b.domain(v).iter().copied().collect()).collect();
    // Order variables by most-constrained-first for cheap pruning.
    let primal = b.primal_graph();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (domains[v].len(), usize::MAX - primal.degree(v), v));
    let mut assignment = vec![0u32; n];

    fn rec(
        b: &BcspInstance,
        order: &[usize],
        pos: usize,
        domains: &mut Vec<Vec<u32>>,
        assignment: &mut Vec<u32>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        let candidates = domains[v].clone();
        for a in candidates {
            assignment[v] = a;
            let ok = order[..pos].iter().all(|&u| match b.allowed(u, v) {
                Some(s) => s.contains(&(assignment[u], a)),
                None => true,
            });
            if ok && rec(b, order, pos + 1, domains, assignment) {
                return true;
            }
        }
        false
    }

    if rec(b, &order, 0, &mut domains, &mut assignment) {
        Ok(SolveResult { satisfiable: true, assignment: Some(assignment), stats: SolveStats::default() })
    } else {
        Ok(SolveResult::no())
    }
}

// ---------------------------------------------------------------------------
// Boundary sweeps: plain DP and the representative-set algorithm
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct SweepTuple {
    values: Vec<u32>,
    parent: usize,
    chosen: Option<u32>,
}

fn validate_layout(b: &BcspInstance, l: &LinearLayout) -> Result<(), SolveError> {
    let mut seen = vec![false; b.num_vars()];
    if l.order.len() != b.num_vars() {
        return Err(SolveError::NoLayout);
    }
    for &v in &l.order {
        if v >= b.num_vars() || seen[v] {
            return Err(SolveError::NoLayout);
        }
        seen[v] = true;
    }
    Ok(())
}

/// Shared sweep over a layout. With `reduce` unset this is the plain dynamic
/// program whose state is the full boundary assignment; with it set, each
/// step additionally shrinks the table to a row basis of the moment matrix.
fn sweep(
    b: &BcspInstance,
    l: &LinearLayout,
    reduce: bool,
    p: u64,
) -> Result<SolveResult, SolveError> {
    validate_layout(b, l)?;
    if reduce && p <= b.d_max() as u64 {
        return Err(SolveError::DegenerateField { p, dmax: b.d_max() as u64 });
    }
    let slices = if reduce { Some(compute_k_and_slices(b)) } else { None };
    let k_slots = slices.as_ref().map(|s| s.k).unwrap_or(0);
    let primal = b.primal_graph();
    let bounds = boundary_sets(&primal, &l.order);
    let n = b.num_vars();

    let mut tables: Vec<Vec<SweepTuple>> = Vec::with_capacity(n + 1);
    tables.push(vec![SweepTuple { values: Vec::new(), parent: usize::MAX, chosen: None }]);
    let mut stats = SolveStats::default();
    let mut prev_x: Vec<usize> = Vec::new();

    for i in 0..n {
        let v = l.order[i];
        let x_i = &bounds.x[i];
        let keep: Vec<usize> = x_i
            .iter()
            .filter(|u| **u != v)
            .map(|u| prev_x.binary_search(u).expect("boundary shrinks monotonically"))
            .collect();
        let v_in_x = x_i.binary_search(&v).is_ok();
        // Constraints from v back into the previous boundary.
        let back: Vec<(usize, BTreeSet<(u32, u32)>)> = prev_x
            .iter()
            .enumerate()
            .filter_map(|(j, &u)| b.allowed(u, v).map(|s| (j, s)))
            .collect();

        let _ = v_in_x;
        let mut extended: Vec<SweepTuple> = Vec::new();
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        for (ti, t) in tables[i].iter().enumerate() {
            for &a in b.domain(v) {
                if !back.iter().all(|(j, s)| s.contains(&(t.values[*j], a))) {
                    continue;
                }
                let mut values: Vec<u32> = Vec::with_capacity(x_i.len());
                let mut kk = 0usize;
                for &u in x_i.iter() {
                    if u == v {
                        values.push(a);
                    } else {
                        values.push(t.values[keep[kk]]);
                        kk += 1;
                    }
                }
                if seen.insert(values.clone()) {
                    extended.push(SweepTuple { values, parent: ti, chosen: Some(a) });
                }
            }
        }

        let product_bound: u128 = bounds.deg[i]
            .values()
            .map(|&d| (d as u128) + 1)
            .fold(1u128, |a, x| a.saturating_mul(x))
            .saturating_pow(k_slots as u32);
        let cut_edges: usize = bounds.deg[i].values().sum();
        let power_bound: u128 =
            1u128.checked_shl((k_slots * cut_edges) as u32).unwrap_or(u128::MAX);

        let reduced = if let Some(slices) = &slices {
            reduce_table(&extended, x_i, &bounds.deg[i], slices.k, p)?
        } else {
            (0..extended.len()).collect()
        };
        let table: Vec<SweepTuple> = reduced.iter().map(|&j| extended[j].clone()).collect();

        stats.max_table_size = stats.max_table_size.max(extended.len()).max(table.len());
        if reduce {
            let within =
                (table.len() as u128) <= product_bound && (table.len() as u128) <= power_bound;
            if !within {
                stats.bound_violations += 1;
            }
            stats.steps.push(StepStat {
                extended: extended.len(),
                reduced: table.len(),
                product_bound,
                power_bound,
            });
        }
        tables.push(table);
        prev_x = x_i.clone();
    }

    let last = tables.last().unwrap();
    if last.is_empty() {
        return Ok(SolveResult { satisfiable: false, assignment: None, stats });
    }
    // Walk parent pointers to recover one value per variable.
    let mut assignment = vec![0u32; n];
    let mut idx = 0usize;
    for i in (0..n).rev() {
        let t = &tables[i + 1][idx];
        assignment[l.order[i]] = t.chosen.unwrap();
        idx = t.parent;
    }
    debug_assert!(b.check_assignment(&assignment));
    Ok(SolveResult { satisfiable: true, assignment: Some(assignment), stats })
}

/// The row of `L` for one boundary assignment: `L[x, dbar]` is the product
/// over the `k` slot blocks of `prod_u x_u^{d_u}`, columns laid out in mixed
/// radix, ascending.
fn l_matrix_row(values: &[u32], radices: &[usize], k: usize, p: u64) -> Vec<u64> {
    let cols_one: usize = radices.iter().product();
    let pows: Vec<Vec<u64>> = values
        .iter()
        .zip(radices)
        .map(|(&val, &r)| {
            let mut pw = Vec::with_capacity(r);
            let mut acc = 1u64;
            for _ in 0..r {
                pw.push(acc);
                acc = mod_mul(acc, val as u64, p);
            }
            pw
        })
        .collect();
    let mut block = vec![1u64; cols_one];
    for (ci, cell) in block.iter_mut().enumerate() {
        let mut rem = ci;
        let mut acc = 1u64;
        for (pw, &r) in pows.iter().zip(radices) {
            acc = mod_mul(acc, pw[rem % r], p);
            rem /= r;
        }
        *cell = acc;
    }
    // The slot blocks are identical, so fold the single block k times.
    let cols = cols_one.pow(k as u32);
    let mut row = vec![1u64; cols];
    for (ci, cell) in row.iter_mut().enumerate() {
        let mut rem = ci;
        let mut acc = 1u64;
        for _ in 0..k {
            acc = mod_mul(acc, block[rem % cols_one], p);
            rem /= cols_one;
        }
        *cell = acc;
    }
    row
}

/// Rank reduction of one sweep step: returns the indices of the rows kept in
/// a row basis of `L[S, .]`. With no slot functions (`K = 0`) every row of
/// `L` is the single all-ones column, so only the first tuple survives.
fn reduce_table(
    table: &[SweepTuple],
    x_vars: &[usize],
    deg: &BTreeMap<usize, usize>,
    k: usize,
    p: u64,
) -> Result<Vec<usize>, SolveError> {
    if table.is_empty() {
        return Ok(Vec::new());
    }
    if k == 0 {
        return Ok(vec![0]);
    }
    let radices: Vec<usize> = x_vars.iter().map(|u| deg[u] + 1).collect();
    let cols: u128 = radices
        .iter()
        .map(|&r| r as u128)
        .product::<u128>()
        .saturating_pow(k as u32);
    if cols > table.len() as u128 {
        // More columns than rows: the table already satisfies the size bound
        // and is trivially its own representative; skip the elimination.
        return Ok((0..table.len()).collect());
    }
    if cols > 1 << 22 {
        return Err(SolveError::ReduceTooLarge(cols));
    }
    let rows: Vec<Vec<u64>> =
        table.iter().map(|t| l_matrix_row(&t.values, &radices, k, p)).collect();
    Ok(row_basis_indices(&rows, p))
}

/// Plain dynamic program over the layout; the state at each cut is the full
/// assignment of the boundary variables, deduplicated but never reduced.
pub fn layout_dp(b: &BcspInstance, l: &LinearLayout) -> Result<SolveResult, SolveError> {
    sweep(b, l, false, DEFAULT_PRIME)
}

/// The representative-set sweep: extend, project to the new boundary, then
/// shrink to a row basis of the moment matrix over `F_p`.
pub fn repset_solve(b: &BcspInstance, l: &LinearLayout) -> Result<SolveResult, SolveError> {
    repset_solve_with_prime(b, l, DEFAULT_PRIME)
}

pub fn repset_solve_with_prime(
    b: &BcspInstance,
    l: &LinearLayout,
    p: u64,
) -> Result<SolveResult, SolveError> {
    sweep(b, l, true, p)
}

// ---------------------------------------------------------------------------
// Representativeness helpers exposed for behavioral tests
// ---------------------------------------------------------------------------

/// Evaluates the moment-matrix entry `M[x, y]` directly from the slot maps:
/// the product over crossing edges and slots of `(x_u - sigma_uv^(i)(y_v))`.
pub fn moment_entry(
    slices: &ConstraintSlices,
    cross_edges: &[(usize, usize)],
    x_assign: &BTreeMap<usize, u32>,
    y_assign: &BTreeMap<usize, u32>,
    p: u64,
) -> u64 {
    let mut acc = 1u64;
    for &(u, v) in cross_edges {
        let xu = x_assign[&u] as u64;
        let yv = y_assign[&v];
        for &s in slices.slots(u, v, yv) {
            let factor = (xu + p - s as u64) % p;
            acc = mod_mul(acc, factor, p);
        }
    }
    acc
}

/// Reduces an explicit set of boundary assignments to a representative subset
/// via the row basis of `L[S, .]`; returns the kept indices.
pub fn reduce_representative(
    b: &BcspInstance,
    x_vars: &[usize],
    y_vars: &[usize],
    tuples: &[Vec<u32>],
    p: u64,
) -> Result<Vec<usize>, SolveError> {
    let slices = compute_k_and_slices(b);
    let yset: BTreeSet<usize> = y_vars.iter().copied().collect();
    let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
    for &u in x_vars {
        let d = b
            .constraints()
            .keys()
            .filter(|&&(a, c)| (a == u && yset.contains(&c)) || (c == u && yset.contains(&a)))
            .count();
        deg.insert(u, d);
    }
    let table: Vec<SweepTuple> = tuples
        .iter()
        .map(|v| SweepTuple { values: v.clone(), parent: usize::MAX, chosen: None })
        .collect();
    reduce_table(&table, x_vars, &deg, slices.k, p)
}

// ---------------------------------------------------------------------------
// Feedback-set engine
// ---------------------------------------------------------------------------

/// Arc-consistency state over bitmask lists (targets have at most 32
/// vertices in scope; reductions use at most 16).
struct AcState {
    masks: Vec<u32>,
    nbr_mask: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl AcState {
    fn new(inst: &ListInstance) -> AcState {
        let nbr_mask: Vec<u32> = (0..inst.h.n())
            .map(|x| inst.h.neighbors(x).iter().fold(0u32, |m, &y| m | 1 << y))
            .collect();
        let masks: Vec<u32> = (0..inst.g.n())
            .map(|v| {
                let mut m = inst.lists[v].iter().fold(0u32, |m, &x| m | 1 << x);
                if inst.g.has_loop(v) {
                    m &= (0..inst.h.n()).filter(|&x| inst.h.has_edge(x, x)).fold(0u32, |a, x| a | 1 << x);
                }
                m
            })
            .collect();
        let adj: Vec<Vec<usize>> = (0..inst.g.n())
            .map(|v| inst.g.neighbors(v).iter().copied().filter(|&w| w != v).collect())
            .collect();
        AcState { masks, nbr_mask, adj }
    }

    /// Propagates to a fixpoint from the seed queue; records every mask
    /// change on the trail. Returns false when some list empties.
    fn propagate(&mut self, seed: &[usize], trail: &mut Vec<(usize, u32)>) -> bool {
        let mut queue: Vec<usize> = seed.to_vec();
        while let Some(v) = queue.pop() {
            let vm = self.masks[v];
            for i in 0..self.adj[v].len() {
                let w = self.adj[v][i];
                let old = self.masks[w];
                let mut new = 0u32;
                let mut rest = old;
                while rest != 0 {
                    let x = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    if self.nbr_mask[x] & vm != 0 {
                        new |= 1 << x;
                    }
                }
                if new != old {
                    trail.push((w, old));
                    self.masks[w] = new;
                    if new == 0 {
                        return false;
                    }
                    queue.push(w);
                }
            }
        }
        true
    }

    fn undo(&mut self, trail: &[(usize, u32)], from: usize) {
        for &(v, old) in trail[from..].iter().rev() {
            self.masks[v] = old;
        }
    }
}

/// Decides an LHom instance given a feedback vertex set of its instance
/// graph: branch over the feedback vertices with arc-consistency propagation
/// after each choice; once every feedback vertex is forced, arc consistency
/// on the remaining forest is decisive.
pub fn fvs_solve(inst: &ListInstance, fvs: &[usize]) -> Result<SolveResult, SolveError> {
    let fvs_set: BTreeSet<usize> = fvs.iter().copied().collect();
    let rest: Vec<usize> = (0..inst.g.n()).filter(|v| !fvs_set.contains(v)).collect();
    let (forest, _) = inst.g.induced(&rest);
    if !forest.is_forest() {
        return Err(SolveError::BadFeedbackSet);
    }
    let mut state = AcState::new(inst);
    if state.masks.iter().any(|&m| m == 0) {
        return Ok(SolveResult::no());
    }
    let mut trail: Vec<(usize, u32)> = Vec::new();
    let all: Vec<usize> = (0..inst.g.n()).collect();
    if !state.propagate(&all, &mut trail) {
        return Ok(SolveResult::no());
    }

    fn branch(
        state: &mut AcState,
        fvs: &[usize],
        trail: &mut Vec<(usize, u32)>,
    ) -> bool {
        // Next undetermined feedback vertex, in the given order.
        let next = fvs.iter().copied().find(|&v| state.masks[v].count_ones() > 1);
        let v = match next {
            None => return true,
            Some(v) => v,
        };
        let mut rest = state.masks[v];
        while rest != 0 {
            let x = rest.trailing_zeros();
            rest &= rest - 1;
            let mark = trail.len();
            trail.push((v, state.masks[v]));
            state.masks[v] = 1 << x;
            if state.propagate(&[v], trail) && branch(state, fvs, trail) {
                return true;
            }
            state.undo(trail, mark);
            trail.truncate(mark);
        }
        false
    }

    let sat = branch(&mut state, fvs, &mut trail);
    if !sat {
        return Ok(SolveResult::no());
    }
    // All feedback vertices are singletons and the forest part is arc
    // consistent and nonempty; read off a homomorphism by rooting each tree.
    let mut phi: Vec<Option<usize>> = (0..inst.g.n())
        .map(|v| {
            let m = state.masks[v];
            if fvs_set.contains(&v) || m.count_ones() == 1 {
                Some(m.trailing_zeros() as usize)
            } else {
                None
            }
        })
        .collect();
    // Assign remaining forest vertices greedily in BFS order; supports exist
    // by arc consistency.
    let mut order: Vec<usize> = Vec::new();
    let mut seen: Vec<bool> = (0..inst.g.n()).map(|v| phi[v].is_some()).collect();
    for s in 0..inst.g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in inst.g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    for &v in &order {
        let mut m = state.masks[v];
        // Restrict to values compatible with already assigned neighbors.
        for &w in inst.g.neighbors(v) {
            if w == v {
                continue;
            }
            if let Some(x) = phi[w] {
                m &= state.nbr_mask[x];
            }
        }
        debug_assert!(m != 0, "arc-consistent forest must extend");
        phi[v] = Some(m.trailing_zeros() as usize);
    }
    let assignment: Vec<u32> = phi.iter().map(|x| (x.unwrap() + 1) as u32).collect();
    debug_assert!(inst.check_homomorphism(&phi.iter().map(|x| x.unwrap()).collect::<Vec<_>>()));
    Ok(SolveResult { satisfiable: true, assignment: Some(assignment), stats: SolveStats::default() })
}

// ---------------------------------------------------------------------------
// Clean sweep for non-bipartite targets
// ---------------------------------------------------------------------------

/// Solves an LHom instance with a connected non-bipartite target (loops
/// allowed) by sweeping the associated bipartite instance over the doubled
/// layout, admitting both copies of each vertex together and enumerating
/// only pairings that color `v'` and `v''` consistently. The reduction
/// matrix is built from the primed-side crossing edges only.
pub fn clean_repset_solve(
    inst: &ListInstance,
    l: &LinearLayout,
) -> Result<SolveResult, SolveError> {
    clean_repset_solve_with_prime(inst, l, DEFAULT_PRIME)
}

pub fn clean_repset_solve_with_prime(
    inst: &ListInstance,
    l: &LinearLayout,
    p: u64,
) -> Result<SolveResult, SolveError> {
    if inst.h.is_bipartite() {
        return Err(SolveError::TargetBipartite);
    }
    if !inst.h.is_connected() {
        return Err(SolveError::TargetBipartite);
    }
    if p <= inst.h.n() as u64 {
        return Err(SolveError::DegenerateField { p, dmax: inst.h.n() as u64 });
    }
    let mut seen = vec![false; inst.g.n()];
    if l.order.len() != inst.g.n() {
        return Err(SolveError::NoLayout);
    }
    for &v in &l.order {
        if v >= inst.g.n() || seen[v] {
            return Err(SolveError::NoLayout);
        }
        seen[v] = true;
    }

    // Slot count of the primed-side constraints: for b in L(v), the values
    // a in L(u) with ab not an edge of H. Only the count matters for the
    // reduction matrix; the slot values never materialize.
    let n = inst.g.n();
    let lists: Vec<Vec<usize>> = (0..n).map(|v| inst.lists[v].iter().copied().collect()).collect();
    let mut k = 0usize;
    for (u, v) in inst.g.edges() {
        if u == v {
            continue;
        }
        for (a, bside) in [(u, v), (v, u)] {
            for &y in &lists[bside] {
                let bad = lists[a].iter().filter(|&&x| !inst.h.has_edge(x, y)).count();
                k = k.max(bad);
            }
        }
    }

    let bounds = boundary_sets(&inst.g, &l.order);
    let mut tables: Vec<Vec<SweepTuple>> = Vec::with_capacity(n + 1);
    tables.push(vec![SweepTuple { values: Vec::new(), parent: usize::MAX, chosen: None }]);
    let mut stats = SolveStats::default();
    let mut prev_x: Vec<usize> = Vec::new();

    for i in 0..n {
        let v = l.order[i];
        let x_i = &bounds.x[i];
        let keep: Vec<usize> = x_i
            .iter()
            .filter(|u| **u != v)
            .map(|u| prev_x.binary_search(u).expect("boundary shrinks monotonically"))
            .collect();
        let back: Vec<usize> = prev_x
            .iter()
            .enumerate()
            .filter(|(_, &u)| inst.g.has_edge(u, v))
            .map(|(j, _)| j)
            .collect();
        let needs_loop = inst.g.has_loop(v);

        let mut extended: Vec<SweepTuple> = Vec::new();
        let mut dedup: BTreeSet<Vec<u32>> = BTreeSet::new();
        for (ti, t) in tables[i].iter().enumerate() {
            for &x in &lists[v] {
                if needs_loop && !inst.h.has_edge(x, x) {
                    continue;
                }
                // Both copies v' -> x', v'' -> x'' at once; every crossing
                // pair of copies imposes the same target adjacency.
                if !back
                    .iter()
                    .all(|&j| inst.h.has_edge((t.values[j] - 1) as usize, x))
                {
                    continue;
                }
                let mut values: Vec<u32> = Vec::with_capacity(x_i.len());
                let mut kk = 0usize;
                for &u in x_i.iter() {
                    if u == v {
                        values.push((x + 1) as u32);
                    } else {
                        values.push(t.values[keep[kk]]);
                        kk += 1;
                    }
                }
                if dedup.insert(values.clone()) {
                    extended.push(SweepTuple {
                        values,
                        parent: ti,
                        chosen: Some((x + 1) as u32),
                    });
                }
            }
        }

        // Reduce over the primed-side crossing edges only.
        let product_bound: u128 = bounds.deg[i]
            .values()
            .map(|&d| (d as u128) + 1)
            .fold(1u128, |a, x| a.saturating_mul(x))
            .saturating_pow(k as u32);
        let cut_edges: usize = bounds.deg[i].values().sum();
        let power_bound: u128 = 1u128.checked_shl((k * cut_edges) as u32).unwrap_or(u128::MAX);
        let kept = reduce_table(&extended, x_i, &bounds.deg[i], k, p)?;
        let table: Vec<SweepTuple> = kept.iter().map(|&j| extended[j].clone()).collect();
        stats.max_table_size = stats.max_table_size.max(extended.len()).max(table.len());
        let within = (table.len() as u128) <= product_bound && (table.len() as u128) <= power_bound;
        if !within {
            stats.bound_violations += 1;
        }
        stats.steps.push(StepStat {
            extended: extended.len(),
            reduced: table.len(),
            product_bound,
            power_bound,
        });
        tables.push(table);
        prev_x = x_i.clone();
    }

    let last = tables.last().unwrap();
    if last.is_empty() {
        return Ok(SolveResult { satisfiable: false, assignment: None, stats });
    }
    let mut assignment = vec![0u32; n];
    let mut idx = 0usize;
    for i in (0..n).rev() {
        let t = &tables[i + 1][idx];
        assignment[l.order[i]] = t.chosen.unwrap();
        idx = t.parent;
    }
    let phi: Vec<usize> = assignment.iter().map(|&a| (a - 1) as usize).collect();
    debug_assert!(inst.check_homomorphism(&phi));
    Ok(SolveResult { satisfiable: true, assignment: Some(assignment), stats })
}

// ---------------------------------------------------------------------------
// Strong-split targets: reflexive clique plus independent set
// ---------------------------------------------------------------------------

/// Detects the strong-split shape of a target: the looped vertices must form
/// a reflexive clique and the rest an independent set.
pub fn strong_split_partition(h: &Graph) -> Result<(Vec<usize>, Vec<usize>), SolveError> {
    let p: Vec<usize> = (0..h.n()).filter(|&v| h.has_loop(v)).collect();
    let b: Vec<usize> = (0..h.n()).filter(|&v| !h.has_loop(v)).collect();
    for (i, &u) in p.iter().enumerate() {
        for &v in &p[i + 1..] {
            if !h.has_edge(u, v) {
                return Err(SolveError::NotStrongSplit);
            }
        }
    }
    for (i, &u) in b.iter().enumerate() {
        for &v in &b[i + 1..] {
            if h.has_edge(u, v) {
                return Err(SolveError::NotStrongSplit);
            }
        }
    }
    Ok((p, b))
}

/// Rewrites an instance whose target splits into a reflexive clique `P` and
/// an independent set `B` into an equivalent instance with a bipartite
/// target: lists become pure-`P` or pure-`B` (dominated `B`-values drop when
/// a `P`-value is present), adjacent pure-`B` vertices are an immediate
/// no-instance, and edges between pure-`P` vertices disappear together with
/// all edges inside `P` in the target.
pub fn strong_split_transform(inst: &ListInstance) -> Result<ListInstance, SolveError> {
    let (p, b) = strong_split_partition(&inst.h)?;
    let pset: BTreeSet<usize> = p.iter().copied().collect();
    let bset: BTreeSet<usize> = b.iter().copied().collect();
    // Purify lists: N(b) ⊆ N(p) for every p in P, b in B, so a mixed list
    // keeps only its P-side.
    let lists: Vec<BTreeSet<usize>> = inst
        .lists
        .iter()
        .map(|l| {
            if l.iter().any(|x| pset.contains(x)) {
                l.iter().copied().filter(|x| pset.contains(x)).collect()
            } else {
                l.clone()
            }
        })
        .collect();
    let p_side: Vec<bool> = lists
        .iter()
        .map(|l| l.iter().any(|x| pset.contains(x)))
        .collect();
    // Adjacent vertices that can only take independent-side values cannot be
    // mapped; fail fast with an unsatisfiable-but-valid bipartite instance.
    for (u, v) in inst.g.edges() {
        let u_b = !p_side[u] && lists[u].iter().all(|x| bset.contains(x));
        let v_b = !p_side[v] && lists[v].iter().all(|x| bset.contains(x));
        if (u == v && u_b) || (u != v && u_b && v_b) {
            return Err(SolveError::StrongSplitNoInstance);
        }
    }
    // Drop target edges inside P (including loops) and instance edges between
    // P-side vertices.
    let h_edges: Vec<(usize, usize)> = inst
        .h
        .edges()
        .into_iter()
        .filter(|&(x, y)| !(pset.contains(&x) && pset.contains(&y)))
        .collect();
    let new_h = Graph::from_edges(inst.h.n(), &h_edges);
    let g_edges: Vec<(usize, usize)> = inst
        .g
        .edges()
        .into_iter()
        .filter(|&(u, v)| !(p_side[u] && p_side[v]))
        .collect();
    let new_g = Graph::from_edges(inst.g.n(), &g_edges);
    Ok(ListInstance::new(new_g, new_h, lists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, Graph};
    use crate::instance::lhom_to_bcsp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn brute_force_basics() {
        let b = BcspInstance::new(vec!["v".into()], vec![[1].into_iter().collect()]);
        let r = brute_force(&b, DEFAULT_BRUTE_BUDGET).unwrap();
        assert!(r.satisfiable);
        assert_eq!(r.assignment, Some(vec![1]));

        let mut b = BcspInstance::new(
            vec!["u".into(), "v".into()],
            vec![[1, 2].into_iter().collect(), [1, 2].into_iter().collect()],
        );
        b.set_constraint(0, 1, BTreeSet::new());
        assert!(!brute_force(&b, DEFAULT_BRUTE_BUDGET).unwrap().satisfiable);
    }

    #[test]
    fn brute_force_identity_homomorphism() {
        let inst = ListInstance::full_lists(cycle(6), cycle(6));
        let b = lhom_to_bcsp(&inst);
        let r = brute_force(&b, DEFAULT_BRUTE_BUDGET).unwrap();
        assert!(r.satisfiable);
        assert!(b.check_assignment(&r.assignment.unwrap()));
    }

    #[test]
    fn brute_force_budget() {
        let domains = vec![(1..=4u32).collect::<BTreeSet<u32>>(); 10];
        let names = (0..10).map(|i| format!("v{i}")).collect();
        let b = BcspInstance::new(names, domains);
        assert!(matches!(brute_force(&b, 1000), Err(SolveError::BudgetExceeded(_))));
    }

    #[test]
    fn sweep_edge_cases() {
        // Empty constraint set with nonempty domains: satisfiable.
        let b = BcspInstance::new(
            vec!["a".into(), "b".into()],
            vec![[1].into_iter().collect(), [2].into_iter().collect()],
        );
        let l = LinearLayout::new(&b.primal_graph(), vec![0, 1]).unwrap();
        assert!(layout_dp(&b, &l).unwrap().satisfiable);
        assert!(repset_solve(&b, &l).unwrap().satisfiable);

        // An empty domain forces no.
        let b2 = BcspInstance::new(vec!["a".into()], vec![BTreeSet::new()]);
        let l2 = LinearLayout::new(&b2.primal_graph(), vec![0]).unwrap();
        assert!(!layout_dp(&b2, &l2).unwrap().satisfiable);
        assert!(!repset_solve(&b2, &l2).unwrap().satisfiable);
    }

    #[test]
    fn repset_rejects_degenerate_field() {
        let b = BcspInstance::new(vec!["a".into()], vec![[1, 2, 3].into_iter().collect()]);
        let l = LinearLayout::new(&b.primal_graph(), vec![0]).unwrap();
        assert!(matches!(
            repset_solve_with_prime(&b, &l, 3),
            Err(SolveError::DegenerateField { .. })
        ));
    }

    #[test]
    fn all_allowed_constraints_reduce_to_single_tuples() {
        let mut b = BcspInstance::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![[1, 2].into_iter().collect(); 3],
        );
        let all: BTreeSet<(u32, u32)> =
            [1u32, 2].iter().flat_map(|&x| [1u32, 2].map(|y| (x, y))).collect();
        b.set_constraint(0, 1, all.clone());
        b.set_constraint(1, 2, all);
        let l = LinearLayout::new(&b.primal_graph(), vec![0, 1, 2]).unwrap();
        let r = repset_solve(&b, &l).unwrap();
        assert!(r.satisfiable);
        assert!(r.stats.steps.iter().all(|s| s.reduced <= 1));
    }

    #[test]
    fn repset_table_bound_on_k4_lists() {
        let inst = ListInstance::full_lists(cycle(5), complete(4));
        let b = lhom_to_bcsp(&inst);
        let primal = b.primal_graph();
        let l = crate::layouts::exact_cutwidth(&primal, 20).unwrap();
        assert_eq!(l.width, 2);
        let r = repset_solve(&b, &l).unwrap();
        assert!(r.satisfiable);
        assert_eq!(r.stats.bound_violations, 0);
        for s in &r.stats.steps {
            assert!((s.reduced as u128) <= s.product_bound);
        }
    }

    fn random_layout<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        order
    }

    #[test]
    fn engines_agree_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for round in 0..300 {
            let n = rng.gen_range(1..=8);
            let b = crate::gen::random_bcsp(&mut rng, n, 4, 0.5);
            let primal = b.primal_graph();
            let l = LinearLayout::new(&primal, random_layout(&mut rng, n)).unwrap();
            let expected = brute_force(&b, DEFAULT_BRUTE_BUDGET).unwrap().satisfiable;
            let dp = layout_dp(&b, &l).unwrap();
            let rs = repset_solve(&b, &l).unwrap();
            assert_eq!(dp.satisfiable, expected, "dp diverges on round {round}");
            assert_eq!(rs.satisfiable, expected, "repset diverges on round {round}");
            assert_eq!(rs.stats.bound_violations, 0);
            if let Some(w) = rs.assignment {
                assert!(b.check_assignment(&w));
            }
        }
    }

    #[test]
    fn representative_subset_behaves_like_original() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..60 {
            let b = crate::gen::random_bcsp(&mut rng, 4, 3, 0.9);
            let x_vars = vec![0, 1];
            let y_vars = vec![2, 3];
            // All boundary assignments over X.
            let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
            for &v in &x_vars {
                let mut next = Vec::new();
                for t in &tuples {
                    for &a in b.domain(v) {
                        let mut t2 = t.clone();
                        t2.push(a);
                        next.push(t2);
                    }
                }
                tuples = next;
            }
            // Random subset S.
            let s: Vec<Vec<u32>> =
                tuples.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
            if s.is_empty() {
                continue;
            }
            let kept = reduce_representative(&b, &x_vars, &y_vars, &s, DEFAULT_PRIME).unwrap();
            let reduced: Vec<&Vec<u32>> = kept.iter().map(|&i| &s[i]).collect();
            // Enumerate all y-assignments and compare extendability.
            let mut ys: Vec<Vec<u32>> = vec![Vec::new()];
            for &v in &y_vars {
                let mut next = Vec::new();
                for t in &ys {
                    for &a in b.domain(v) {
                        let mut t2 = t.clone();
                        t2.push(a);
                        next.push(t2);
                    }
                }
                ys = next;
            }
            let good = |x: &Vec<u32>, y: &Vec<u32>| -> bool {
                for (i, &u) in x_vars.iter().enumerate() {
                    for (j, &v) in y_vars.iter().enumerate() {
                        if let Some(sc) = b.allowed(u, v) {
                            if !sc.contains(&(x[i], y[j])) {
                                return false;
                            }
                        }
                    }
                }
                true
            };
            for y in &ys {
                let orig = s.iter().any(|x| good(x, y));
                let red = reduced.iter().any(|x| good(x, y));
                assert_eq!(orig, red, "representativeness violated");
            }
        }
    }

    #[test]
    fn moment_matrix_nonzero_iff_good() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let b = crate::gen::random_bcsp(&mut rng, 4, 3, 0.8);
            let slices = compute_k_and_slices(&b);
            if slices.k == 0 {
                continue;
            }
            let x_vars = [0usize, 1];
            let y_vars = [2usize, 3];
            let cross: Vec<(usize, usize)> = x_vars
                .iter()
                .flat_map(|&u| y_vars.iter().map(move |&v| (u, v)))
                .filter(|&(u, v)| b.allowed(u, v).is_some())
                .collect();
            for &xa in b.domain(0) {
                for &xb in b.domain(1) {
                    for &ya in b.domain(2) {
                        for &yb in b.domain(3) {
                            let x: BTreeMap<usize, u32> = [(0, xa), (1, xb)].into();
                            let y: BTreeMap<usize, u32> = [(2, ya), (3, yb)].into();
                            let m = moment_entry(&slices, &cross, &x, &y, DEFAULT_PRIME);
                            let good = cross.iter().all(|&(u, v)| {
                                b.allowed(u, v).unwrap().contains(&(x[&u], y[&v]))
                            });
                            assert_eq!(m != 0, good);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fvs_solver_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..150 {
            let hn = rng.gen_range(2..=6);
            let h = crate::gen::random_graph(&mut rng, hn, 0.5, true);
            let gn = rng.gen_range(1..=7);
            let g = crate::gen::random_connected_graph(&mut rng, gn, 0.35);
            let lists: Vec<BTreeSet<usize>> = (0..g.n())
                .map(|_| (0..hn).filter(|_| rng.gen_bool(0.7)).collect())
                .collect();
            let inst = ListInstance::new(g.clone(), h, lists);
            let f = crate::layouts::exact_fvs(&g, 25).unwrap();
            let fvs: Vec<usize> = f.vertices.iter().copied().collect();
            let got = fvs_solve(&inst, &fvs).unwrap();
            let want = brute_force(&lhom_to_bcsp(&inst), DEFAULT_BRUTE_BUDGET)
                .unwrap()
                .satisfiable;
            assert_eq!(got.satisfiable, want);
            if let Some(w) = got.assignment {
                let phi: Vec<usize> = w.iter().map(|&a| (a - 1) as usize).collect();
                assert!(inst.check_homomorphism(&phi));
            }
        }
    }

    #[test]
    fn fvs_solver_rejects_bad_feedback_set() {
        let inst = ListInstance::full_lists(cycle(4), cycle(4));
        assert!(matches!(fvs_solve(&inst, &[]), Err(SolveError::BadFeedbackSet)));
    }

    #[test]
    fn clean_solver_requires_nonbipartite_target() {
        let inst = ListInstance::full_lists(cycle(4), cycle(6));
        let l = LinearLayout::new(&inst.g, vec![0, 1, 2, 3]).unwrap();
        assert!(matches!(clean_repset_solve(&inst, &l), Err(SolveError::TargetBipartite)));
    }

    #[test]
    fn clean_solver_c5_to_k3() {
        let inst = ListInstance::full_lists(cycle(5), complete(3));
        let l = LinearLayout::new(&inst.g, vec![0, 1, 2, 3, 4]).unwrap();
        let r = clean_repset_solve(&inst, &l).unwrap();
        assert!(r.satisfiable);
        let phi: Vec<usize> =
            r.assignment.unwrap().iter().map(|&a| (a - 1) as usize).collect();
        assert!(inst.check_homomorphism(&phi));
    }

    #[test]
    fn clean_solver_forced_conflict_is_unsat() {
        // Singleton lists forcing adjacent C5 vertices onto the same K3
        // vertex.
        let lists = vec![set(&[0]), set(&[0]), set(&[1]), set(&[2]), set(&[1])];
        let inst = ListInstance::new(cycle(5), complete(3), lists);
        let l = LinearLayout::new(&inst.g, vec![0, 1, 2, 3, 4]).unwrap();
        assert!(!clean_repset_solve(&inst, &l).unwrap().satisfiable);
    }

    #[test]
    fn clean_solver_loop_target() {
        // One looped vertex inside a non-bipartite target; constant map onto
        // the loop.
        let h = Graph::from_edges(3, &[(0, 0), (0, 1), (1, 2), (0, 2)]);
        let g = crate::gen::random_connected_graph(&mut ChaCha8Rng::seed_from_u64(5), 5, 0.4);
        let lists = vec![set(&[0]); 5];
        let inst = ListInstance::new(g, h, lists);
        let l = LinearLayout::new(&inst.g, (0..5).collect()).unwrap();
        let r = clean_repset_solve(&inst, &l).unwrap();
        assert!(r.satisfiable);
    }

    #[test]
    fn clean_solver_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(31337);
        for round in 0..100 {
            let hn = rng.gen_range(3..=6);
            let h = crate::gen::random_connected_nonbipartite(&mut rng, hn, 0.25);
            let gn = rng.gen_range(1..=7);
            let g = crate::gen::random_graph(&mut rng, gn, 0.4, false);
            let lists: Vec<BTreeSet<usize>> = (0..gn)
                .map(|_| (0..hn).filter(|_| rng.gen_bool(0.75)).collect())
                .collect();
            let inst = ListInstance::new(g, h, lists);
            let l = LinearLayout::new(&inst.g, random_layout(&mut rng, gn)).unwrap();
            let got = clean_repset_solve(&inst, &l).unwrap();
            let want = brute_force(&lhom_to_bcsp(&inst), DEFAULT_BRUTE_BUDGET)
                .unwrap()
                .satisfiable;
            assert_eq!(got.satisfiable, want, "clean sweep diverges on round {round}");
        }
    }

    #[test]
    fn strong_split_examples() {
        // Looped vertex p (index 0) with pendant b (index 1).
        let h = Graph::from_edges(2, &[(0, 0), (0, 1)]);
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = ListInstance::new(g, h, vec![set(&[0]), set(&[1])]);
        let out = strong_split_transform(&inst).unwrap();
        assert!(out.h.is_bipartite());
        let before = brute_force(&lhom_to_bcsp(&inst), DEFAULT_BRUTE_BUDGET)
            .unwrap()
            .satisfiable;
        let after = brute_force(&lhom_to_bcsp(&out), DEFAULT_BRUTE_BUDGET)
            .unwrap()
            .satisfiable;
        assert!(before && after);

        // Two adjacent vertices with independent-side lists: immediate no.
        let h = Graph::from_edges(3, &[(0, 0), (0, 1), (0, 2)]);
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = ListInstance::new(g, h, vec![set(&[1]), set(&[2])]);
        assert!(matches!(
            strong_split_transform(&inst),
            Err(SolveError::StrongSplitNoInstance)
        ));

        // Empty P: target already bipartite-shaped, pass-through.
        let h = Graph::from_edges(2, &[]);
        let g = Graph::from_edges(1, &[]);
        let inst = ListInstance::new(g, h, vec![set(&[0, 1])]);
        let out = strong_split_transform(&inst).unwrap();
        assert_eq!(out.lists, inst.lists);

        // A non-clique of loops is not strong-split.
        let h = Graph::from_edges(2, &[(0, 0), (1, 1)]);
        let inst = ListInstance::full_lists(Graph::from_edges(1, &[]), h);
        assert!(matches!(strong_split_transform(&inst), Err(SolveError::NotStrongSplit)));
    }

    #[test]
    fn strong_split_preserves_satisfiability() {
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        let mut tested = 0;
        for _ in 0..400 {
            // Build a random strong-split target: clique of loops + pendants.
            let p = rng.gen_range(1..=3usize);
            let b = rng.gen_range(1..=3usize);
            let mut edges = Vec::new();
            for u in 0..p {
                edges.push((u, u));
                for v in u + 1..p {
                    edges.push((u, v));
                }
            }
            for w in 0..b {
                for u in 0..p {
                    if rng.gen_bool(0.6) {
                        edges.push((u, p + w));
                    }
                }
            }
            let h = Graph::from_edges(p + b, &edges);
            let gn = rng.gen_range(1..=6);
            let g = crate::gen::random_graph(&mut rng, gn, 0.4, false);
            let lists: Vec<BTreeSet<usize>> = (0..gn)
                .map(|_| (0..p + b).filter(|_| rng.gen_bool(0.6)).collect())
                .collect();
            let inst = ListInstance::new(g, h, lists);
            let before = brute_force(&lhom_to_bcsp(&inst), DEFAULT_BRUTE_BUDGET)
                .unwrap()
                .satisfiable;
            match strong_split_transform(&inst) {
                Ok(out) => {
                    assert!(out.h.is_bipartite());
                    let after = brute_force(&lhom_to_bcsp(&out), DEFAULT_BRUTE_BUDGET)
                        .unwrap()
                        .satisfiable;
                    assert_eq!(before, after);
                    tested += 1;
                }
                Err(SolveError::StrongSplitNoInstance) => {
                    assert!(!before, "shortcut must only fire on no-instances");
                    tested += 1;
                }
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
        assert!(tested > 100);
    }
}
