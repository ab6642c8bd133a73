//! Gadget constructions: walk-path gadgets and their compositions, the
//! NAND/OR relation gadgets, distinguisher synthesis, detectors, assignment
//! gadgets, and switching gadgets. Every built gadget carries its interface
//! relation, recomputed by exhaustive enumeration at construction time.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::gadgets::walks::{avoids, CornerTriple, TripleCase, Walk};
use crate::gadgets::GadgetError;
use crate::graph::Graph;
use crate::instance::ListInstance;
use crate::solvers::fvs_solve;

/// A graph with lists, named interface vertices, and the machine-verified
/// relation realized on the interface by list homomorphisms.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub h: Graph,
    pub graph: Graph,
    pub lists: Vec<BTreeSet<usize>>,
    /// Interface in declaration order; relation tuples follow this order.
    pub interface: Vec<(String, usize)>,
    pub relation: BTreeSet<Vec<usize>>,
}

impl Gadget {
    pub fn interface_vertex(&self, name: &str) -> usize {
        self.interface
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
            .unwrap_or_else(|| panic!("gadget has no interface vertex {name}"))
    }

    pub fn as_instance(&self) -> ListInstance {
        ListInstance::new(self.graph.clone(), self.h.clone(), self.lists.clone())
    }
}

/// Computes the interface relation by pinning every interface tuple and
/// deciding the rest; the gadget minus its interface must be a forest, which
/// holds for every construction here (cycles pass through interfaces only).
fn compute_relation(
    h: &Graph,
    graph: &Graph,
    lists: &[BTreeSet<usize>],
    interface: &[(String, usize)],
) -> Result<BTreeSet<Vec<usize>>, GadgetError> {
    let iface: Vec<usize> = interface.iter().map(|&(_, v)| v).collect();
    let mut relation = BTreeSet::new();
    let mut tuple = vec![0usize; iface.len()];
    fn rec(
        h: &Graph,
        graph: &Graph,
        lists: &[BTreeSet<usize>],
        iface: &[usize],
        pos: usize,
        tuple: &mut Vec<usize>,
        relation: &mut BTreeSet<Vec<usize>>,
    ) -> Result<(), GadgetError> {
        if pos == iface.len() {
            let mut pinned = lists.to_vec();
            for (i, &v) in iface.iter().enumerate() {
                pinned[v] = [tuple[i]].into_iter().collect();
            }
            let inst = ListInstance::new(graph.clone(), h.clone(), pinned);
            let res = fvs_solve(&inst, iface).map_err(|e| {
                GadgetError::PreconditionViolated(format!(
                    "gadget body must be a forest away from its interface: {e}"
                ))
            })?;
            if res.satisfiable {
                relation.insert(tuple.clone());
            }
            return Ok(());
        }
        for &x in &lists[iface[pos]] {
            tuple[pos] = x;
            rec(h, graph, lists, iface, pos + 1, tuple, relation)?;
        }
        Ok(())
    }
    rec(h, graph, lists, &iface, 0, &mut tuple, &mut relation)?;
    Ok(relation)
}

fn make_gadget(
    h: &Graph,
    graph: Graph,
    lists: Vec<BTreeSet<usize>>,
    interface: Vec<(String, usize)>,
) -> Result<Gadget, GadgetError> {
    let distinct: BTreeSet<usize> = interface.iter().map(|&(_, v)| v).collect();
    if distinct.len() != interface.len() {
        return Err(GadgetError::PreconditionViolated(
            "interface vertices must be distinct".into(),
        ));
    }
    let relation = compute_relation(h, &graph, &lists, &interface)?;
    Ok(Gadget { h: h.clone(), graph, lists, interface, relation })
}

fn path_gadget(
    h: &Graph,
    lists: Vec<BTreeSet<usize>>,
    interface: Vec<(String, usize)>,
) -> Result<Gadget, GadgetError> {
    let edges: Vec<(usize, usize)> = (1..lists.len()).map(|i| (i - 1, i)).collect();
    make_gadget(h, Graph::from_edges(lists.len(), &edges), lists, interface)
}

fn expect_relation(g: &Gadget, name: &str, expected: &BTreeSet<Vec<usize>>) -> Result<(), GadgetError> {
    if &g.relation == expected {
        Ok(())
    } else {
        Err(GadgetError::VerificationFailed {
            name: name.into(),
            detail: format!("relation {:?} differs from expected {:?}", g.relation, expected),
        })
    }
}

// ---------------------------------------------------------------------------
// Walk-path gadgets
// ---------------------------------------------------------------------------

/// Builds the path gadget of a walk family: vertex `i` carries the set of
/// `i`-th walk vertices. The family splits into `a_idx` and `b_idx`; the
/// one-sided (or mutual) avoidance preconditions and endpoint disjointness
/// are checked, and the characteristic properties re-verified on the
/// computed relation.
pub fn build_walk_path(
    h: &Graph,
    walks: &[Walk],
    a_idx: &[usize],
    b_idx: &[usize],
    mutual: bool,
) -> Result<Gadget, GadgetError> {
    if walks.is_empty() || a_idx.is_empty() || b_idx.is_empty() {
        return Err(GadgetError::PreconditionViolated("walk family must split into two nonempty parts".into()));
    }
    let len = walks[0].len();
    if len == 0 || walks.iter().any(|w| w.len() != len) {
        return Err(GadgetError::PreconditionViolated("walks must share a positive length".into()));
    }
    let starts = |idx: &[usize]| -> BTreeSet<usize> { idx.iter().map(|&i| walks[i].start()).collect() };
    let ends = |idx: &[usize]| -> BTreeSet<usize> { idx.iter().map(|&i| walks[i].end()).collect() };
    let (sa, sb) = (starts(a_idx), starts(b_idx));
    let (ta, tb) = (ends(a_idx), ends(b_idx));
    if sa.intersection(&sb).next().is_some() || ta.intersection(&tb).next().is_some() {
        return Err(GadgetError::PreconditionViolated("endpoint sets of the two parts must be disjoint".into()));
    }
    for &i in a_idx {
        for &j in b_idx {
            if !avoids(h, &walks[i], &walks[j]) {
                return Err(GadgetError::PreconditionViolated(format!(
                    "walk {i} does not avoid walk {j}"
                )));
            }
            if mutual && !avoids(h, &walks[j], &walks[i]) {
                return Err(GadgetError::PreconditionViolated(format!(
                    "walk {j} does not avoid walk {i}"
                )));
            }
        }
    }
    let lists: Vec<BTreeSet<usize>> = (0..=len)
        .map(|i| walks.iter().map(|w| w.vertices[i]).collect())
        .collect();
    let gadget = path_gadget(
        h,
        lists,
        vec![("in".into(), 0), ("out".into(), len)],
    )?;
    // (b) every walk's endpoints are realizable; (c) no A-start reaches a
    // B-end; (d) mutually, no B-start reaches an A-end.
    for w in walks {
        if !gadget.relation.contains(&vec![w.start(), w.end()]) {
            return Err(GadgetError::VerificationFailed {
                name: "walk-path".into(),
                detail: format!("endpoint pair ({}, {}) not realizable", w.start(), w.end()),
            });
        }
    }
    for t in &gadget.relation {
        if sa.contains(&t[0]) && tb.contains(&t[1]) {
            return Err(GadgetError::VerificationFailed {
                name: "walk-path".into(),
                detail: format!("A-start {} reaches B-end {}", t[0], t[1]),
            });
        }
        if mutual && sb.contains(&t[0]) && ta.contains(&t[1]) {
            return Err(GadgetError::VerificationFailed {
                name: "walk-path".into(),
                detail: format!("B-start {} reaches A-end {}", t[0], t[1]),
            });
        }
    }
    Ok(gadget)
}

/// Concatenates two path gadgets by identifying the output of `a` with the
/// input of `b` (equal lists required); the relation of the result must be
/// the relational join.
pub fn compose_path_gadgets(a: &Gadget, b: &Gadget) -> Result<Gadget, GadgetError> {
    let a_out = a.interface_vertex("out");
    let b_in = b.interface_vertex("in");
    assert!(
        a_out == a.lists.len() - 1 && b_in == 0,
        "composition expects canonical path gadgets"
    );
    if a.lists[a_out] != b.lists[b_in] {
        return Err(GadgetError::PreconditionViolated(
            "composition requires equal boundary lists".into(),
        ));
    }
    let a_len = a.lists.len();
    let lists: Vec<BTreeSet<usize>> = a
        .lists
        .iter()
        .cloned()
        .chain(b.lists.iter().skip(1).cloned())
        .collect();
    let gadget = path_gadget(
        &a.h,
        lists,
        vec![("in".into(), 0), ("out".into(), a_len - 1 + b.lists.len() - 1)],
    )?;
    let join: BTreeSet<Vec<usize>> = a
        .relation
        .iter()
        .flat_map(|t1| {
            b.relation
                .iter()
                .filter(move |t2| t1[1] == t2[0])
                .map(move |t2| vec![t1[0], t2[1]])
        })
        .collect();
    expect_relation(&gadget, "composition", &join)?;
    Ok(gadget)
}

/// The parity-preserving extender: an even path alternating
/// `{alpha, beta}` and `{alpha', beta'}`. Both endpoints are forced to the
/// same value, so appending it to a gadget endpoint with list
/// `{alpha, beta}` preserves the gadget's relation.
pub fn extender_path(h: &Graph, t: &CornerTriple, len: usize) -> Result<Gadget, GadgetError> {
    assert!(len >= 2 && len % 2 == 0, "extender length must be even and positive");
    let ab: BTreeSet<usize> = [t.alpha, t.beta].into_iter().collect();
    let apbp: BTreeSet<usize> = [t.alpha_prime, t.beta_prime].into_iter().collect();
    let lists: Vec<BTreeSet<usize>> = (0..=len)
        .map(|i| if i % 2 == 0 { ab.clone() } else { apbp.clone() })
        .collect();
    let gadget = path_gadget(h, lists, vec![("in".into(), 0), ("out".into(), len)])?;
    let expected: BTreeSet<Vec<usize>> =
        [vec![t.alpha, t.alpha], vec![t.beta, t.beta]].into_iter().collect();
    expect_relation(&gadget, "extender", &expected)?;
    Ok(gadget)
}

/// Pads a path gadget at its input end to reach total length at least
/// `min_len`, preserving the relation (requires input list `{alpha, beta}`).
fn pad_front_to(
    h: &Graph,
    t: &CornerTriple,
    gadget: Gadget,
    min_len: usize,
) -> Result<Gadget, GadgetError> {
    let cur = gadget.lists.len() - 1;
    if cur >= min_len {
        return Ok(gadget);
    }
    let need = min_len - cur;
    let pad = need + need % 2;
    let ext = extender_path(h, t, pad)?;
    let composed = compose_path_gadgets(&ext, &gadget)?;
    expect_relation(&composed, "padded path", &gadget.relation)?;
    Ok(composed)
}

// ---------------------------------------------------------------------------
// NAND2
// ---------------------------------------------------------------------------

fn wlist(w: &[usize], picks: &[usize]) -> BTreeSet<usize> {
    picks.iter().map(|&i| w[i - 1]).collect()
}

pub fn nand2_relation(t: &CornerTriple) -> BTreeSet<Vec<usize>> {
    [
        vec![t.alpha, t.alpha],
        vec![t.alpha, t.beta],
        vec![t.beta, t.alpha],
    ]
    .into_iter()
    .collect()
}

/// The NAND2 gadget: a path of length at least `g` whose endpoints realize
/// `{alpha, beta}^2` minus `(beta, beta)`.
pub fn build_nand2(h: &Graph, t: &CornerTriple, g: usize) -> Result<Gadget, GadgetError> {
    let core = match &t.case {
        TripleCase::C6 { w } => path_gadget(
            h,
            vec![
                wlist(w, &[1, 5]),
                wlist(w, &[2, 6]),
                wlist(w, &[1, 3]),
                wlist(w, &[2, 4]),
                wlist(w, &[1, 5]),
            ],
            vec![("in".into(), 0), ("out".into(), 4)],
        )?,
        TripleCase::C8 { w } => path_gadget(
            h,
            vec![
                wlist(w, &[1, 5]),
                wlist(w, &[2, 4, 8]),
                wlist(w, &[1, 3, 7]),
                wlist(w, &[2, 6]),
                wlist(w, &[1, 5]),
            ],
            vec![("in".into(), 0), ("out".into(), 4)],
        )?,
        TripleCase::StronglyIncomparable { .. } => {
            let walks = t.triple_walks.as_ref().expect("strong case carries walks");
            let [xg, yg, zg] = &walks[&t.gamma];
            let [xa, ya, za] = &walks[&t.alpha];
            let p1 = build_walk_path(h, &[xg.clone(), yg.clone(), zg.clone()], &[0, 1], &[2], true)?;
            let p2 = build_walk_path(
                h,
                &[xa.reversed(), ya.reversed(), za.reversed()],
                &[0, 1],
                &[2],
                true,
            )?;
            compose_path_gadgets(&p1, &p2)?
        }
    };
    let padded = pad_front_to(h, t, core, g)?;
    expect_relation(&padded, "nand2", &nand2_relation(t))?;
    Ok(padded)
}

// ---------------------------------------------------------------------------
// OR gadgets
// ---------------------------------------------------------------------------

pub fn or_relation(t: &CornerTriple, k: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << k) {
        if mask == 0 {
            continue; // the all-alpha tuple is excluded
        }
        out.insert(
            (0..k)
                .map(|i| if mask >> i & 1 == 1 { t.beta } else { t.alpha })
                .collect(),
        );
    }
    out
}

/// Arm of the OR3 gadget: a path from an `{alpha, beta}` leaf to the shared
/// `{alpha, beta, gamma}` center realizing all pairs except `(alpha, c)`.
fn rc_arm(h: &Graph, t: &CornerTriple, c: usize) -> Result<Gadget, GadgetError> {
    let abg: Vec<usize> = {
        let mut v = vec![t.alpha, t.beta, t.gamma];
        v.sort_unstable();
        v
    };
    let expected: BTreeSet<Vec<usize>> = abg
        .iter()
        .flat_map(|&y| [vec![t.alpha, y], vec![t.beta, y]])
        .filter(|p| !(p[0] == t.alpha && p[1] == c))
        .collect();
    let arm = match &t.case {
        TripleCase::C6 { w } => {
            // Transcribed arm lists; which arm realizes which relation is
            // re-derived behaviorally below.
            let candidates: Vec<Vec<BTreeSet<usize>>> = vec![
                vec![wlist(w, &[1, 5]), wlist(w, &[4, 6]), wlist(w, &[1, 3]), wlist(w, &[2, 4]), wlist(w, &[1, 3, 5])],
                vec![wlist(w, &[1, 5]), wlist(w, &[4, 6]), wlist(w, &[1, 3, 5])],
                vec![wlist(w, &[1, 5]), wlist(w, &[4, 6]), wlist(w, &[3, 5]), wlist(w, &[2, 4]), wlist(w, &[1, 3, 5])],
            ];
            pick_arm(h, candidates, &expected)?
        }
        TripleCase::C8 { w } => {
            let candidates: Vec<Vec<BTreeSet<usize>>> = vec![
                vec![wlist(w, &[1, 5]), wlist(w, &[6, 8]), wlist(w, &[5, 7]), wlist(w, &[4, 6, 8]), wlist(w, &[1, 3, 5])],
                vec![wlist(w, &[1, 5]), wlist(w, &[4, 8]), wlist(w, &[1, 3]), wlist(w, &[2, 4]), wlist(w, &[1, 3, 5])],
                vec![
                    wlist(w, &[1, 5]),
                    wlist(w, &[4, 8]),
                    wlist(w, &[5, 7]),
                    wlist(w, &[4, 6]),
                    wlist(w, &[3, 5]),
                    wlist(w, &[2, 4]),
                    wlist(w, &[1, 3, 5]),
                ],
            ];
            pick_arm(h, candidates, &expected)?
        }
        TripleCase::StronglyIncomparable { .. } => {
            let walks = t.triple_walks.as_ref().unwrap();
            let set = [t.alpha, t.beta, t.gamma];
            let others: Vec<usize> = set.iter().copied().filter(|&v| v != c).collect();
            let a = others[0];
            let (x, y) = &t.forward_pair;
            let [xa, ya, za] = &walks[&a];
            let [xc, yc, zc] = &walks[&c];
            let p1 = build_walk_path(h, &[x.clone(), y.clone()], &[0], &[1], false)?;
            let p2 = build_walk_path(h, &[xa.clone(), ya.clone(), za.clone()], &[0, 1], &[2], true)?;
            let p3 = build_walk_path(
                h,
                &[xc.reversed(), yc.reversed(), zc.reversed()],
                &[0, 1],
                &[2],
                true,
            )?;
            let p4 = build_walk_path(h, &[xc.clone(), yc.clone(), zc.clone()], &[0, 1], &[2], true)?;
            compose_path_gadgets(&compose_path_gadgets(&compose_path_gadgets(&p1, &p2)?, &p3)?, &p4)?
        }
    };
    expect_relation(&arm, &format!("R_{c} arm"), &expected)?;
    Ok(arm)
}

fn pick_arm(
    h: &Graph,
    candidates: Vec<Vec<BTreeSet<usize>>>,
    expected: &BTreeSet<Vec<usize>>,
) -> Result<Gadget, GadgetError> {
    for lists in candidates {
        let last = lists.len() - 1;
        let arm = path_gadget(h, lists, vec![("in".into(), 0), ("out".into(), last)])?;
        if &arm.relation == expected {
            return Ok(arm);
        }
    }
    Err(GadgetError::MissingWalk("no transcribed arm realizes the required relation".into()))
}

/// Builds the OR3 gadget: three arms glued at the shared center; interface
/// leaves `x1, x2, x3`.
fn build_or3(h: &Graph, t: &CornerTriple, g: usize) -> Result<Gadget, GadgetError> {
    let arms = [
        rc_arm(h, t, t.alpha)?,
        rc_arm(h, t, t.beta)?,
        rc_arm(h, t, t.gamma)?,
    ];
    let mut lists: Vec<BTreeSet<usize>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Center first, then each arm as a pendant path into it.
    let center_list = arms[0].lists.last().unwrap().clone();
    lists.push(center_list);
    let mut interface = Vec::new();
    for (ai, arm) in arms.iter().enumerate() {
        let base = lists.len();
        let arm_len = arm.lists.len();
        for i in 0..arm_len - 1 {
            lists.push(arm.lists[i].clone());
        }
        // Path runs leaf .. center: leaf is local 0 -> global base.
        for i in 0..arm_len - 1 {
            let u = base + i;
            let v = if i + 1 == arm_len - 1 { 0 } else { base + i + 1 };
            edges.push((u, v));
        }
        interface.push((format!("x{}", ai + 1), base));
        let _ = g;
    }
    let graph = Graph::from_edges(lists.len(), &edges);
    let gadget = make_gadget(h, graph, lists, interface)?;
    expect_relation(&gadget, "or3", &or_relation(t, 3))?;
    Ok(gadget)
}

/// The OR_k gadget: a tree with the `k` interface vertices as leaves,
/// maximum degree three, and degree-3 vertices pairwise at distance at least
/// `g`. Recursively `OR_k = OR_{k-1} + NAND2 + OR_3`; `OR_2` restricts an
/// `OR_3` leaf to `{alpha}`.
pub fn build_or_k(h: &Graph, t: &CornerTriple, k: usize, g: usize) -> Result<Gadget, GadgetError> {
    if k < 2 {
        return Err(GadgetError::PreconditionViolated("OR gadgets need arity at least 2".into()));
    }
    let gadget = match k {
        2 => {
            let or3 = build_or3(h, t, g)?;
            // Removing beta from the third leaf's list leaves an OR2 on the
            // first two leaves.
            let mut lists = or3.lists.clone();
            let x3 = or3.interface_vertex("x3");
            lists[x3] = [t.alpha].into_iter().collect();
            let interface = vec![
                ("x1".to_string(), or3.interface_vertex("x1")),
                ("x2".to_string(), or3.interface_vertex("x2")),
            ];
            make_gadget(h, or3.graph.clone(), lists, interface)?
        }
        3 => build_or3(h, t, g)?,
        _ => {
            let smaller = build_or_k(h, t, k - 1, g)?;
            let nand = build_nand2(h, t, g)?;
            let or3 = build_or3(h, t, g)?;
            // Identify smaller's last interface with nand's input and or3's
            // first leaf with nand's output.
            let mut lists: Vec<BTreeSet<usize>> = Vec::new();
            let mut edges: Vec<(usize, usize)> = Vec::new();
            let base_s = 0usize;
            lists.extend(smaller.lists.iter().cloned());
            edges.extend(smaller.graph.edges());
            let y = smaller.interface_vertex(&format!("x{}", k - 1));
            // NAND2 path: reuse its interior, gluing endpoint 0 to y.
            let base_n = lists.len();
            for l in &nand.lists[1..] {
                lists.push(l.clone());
            }
            let nand_len = nand.lists.len();
            if nand.lists[0] != smaller.lists[y] {
                return Err(GadgetError::PreconditionViolated("NAND2 endpoint list mismatch".into()));
            }
            for i in 0..nand_len - 1 {
                let u = if i == 0 { y } else { base_n + i - 1 };
                let v = base_n + i;
                edges.push((u, v));
            }
            let z = base_n + nand_len - 2;
            // OR3 glued at its first leaf onto z.
            let base_o = lists.len();
            let x1 = or3.interface_vertex("x1");
            if or3.lists[x1] != *lists.get(z).unwrap() {
                return Err(GadgetError::PreconditionViolated("OR3 leaf list mismatch".into()));
            }
            let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
            remap.insert(x1, z);
            for (i, l) in or3.lists.iter().enumerate() {
                if i != x1 {
                    remap.insert(i, base_o + remap.len() - 1);
                    lists.push(l.clone());
                }
            }
            for (u, v) in or3.graph.edges() {
                edges.push((remap[&u], remap[&v]));
            }
            let mut interface: Vec<(String, usize)> = (1..k - 1)
                .map(|i| {
                    (
                        format!("x{i}"),
                        smaller.interface_vertex(&format!("x{i}")) + base_s,
                    )
                })
                .collect();
            interface.push((format!("x{}", k - 1), remap[&or3.interface_vertex("x2")]));
            interface.push((format!("x{k}"), remap[&or3.interface_vertex("x3")]));
            let graph = Graph::from_edges(lists.len(), &edges);
            make_gadget(h, graph, lists, interface)?
        }
    };
    expect_relation(&gadget, &format!("or{k}"), &or_relation(t, k))?;
    // Structural claims: tree, leaf interfaces, max degree three, spread-out
    // degree-3 vertices.
    if !gadget.graph.is_forest() || !gadget.graph.is_connected() {
        return Err(GadgetError::VerificationFailed {
            name: format!("or{k}"),
            detail: "gadget must be a tree".into(),
        });
    }
    for (name, v) in &gadget.interface {
        if gadget.graph.degree(*v) != 1 {
            return Err(GadgetError::VerificationFailed {
                name: format!("or{k}"),
                detail: format!("interface {name} is not a leaf"),
            });
        }
    }
    if gadget.graph.max_degree() > 3 {
        return Err(GadgetError::VerificationFailed {
            name: format!("or{k}"),
            detail: "maximum degree above three".into(),
        });
    }
    let deg3: Vec<usize> =
        (0..gadget.graph.n()).filter(|&v| gadget.graph.degree(v) == 3).collect();
    for (i, &a) in deg3.iter().enumerate() {
        for &b in &deg3[i + 1..] {
            if gadget.graph.dist(a, b).unwrap_or(usize::MAX) < g {
                return Err(GadgetError::VerificationFailed {
                    name: format!("or{k}"),
                    detail: format!("degree-3 vertices {a}, {b} closer than {g}"),
                });
            }
        }
    }
    Ok(gadget)
}

// ---------------------------------------------------------------------------
// Distinguisher synthesis
// ---------------------------------------------------------------------------

const SYNTHESIS_STATE_BUDGET: usize = 2_000_000;

/// Synthesizes the distinguisher `D_{a/b}`: a path with input list `S` and
/// output list `{alpha, beta}` such that `a` forces `alpha`, `b` reaches
/// `beta`, and every other member reaches one of the two. Found by
/// breadth-first search over reachability profiles (one reachable-set per
/// member of `S`) with candidate lists restricted to subsets of the union of
/// current images; verified exhaustively afterwards.
pub fn synthesize_distinguisher(
    h: &Graph,
    t: &CornerTriple,
    s: &[usize],
    a: usize,
    b: usize,
) -> Result<Gadget, GadgetError> {
    if a == b || !s.contains(&a) || !s.contains(&b) {
        return Err(GadgetError::PreconditionViolated(
            "distinguisher endpoints must be distinct members of S".into(),
        ));
    }
    assert!(h.n() <= 32);
    let nbr_mask: Vec<u32> = (0..h.n())
        .map(|x| h.neighbors(x).iter().fold(0u32, |m, &y| m | 1 << y))
        .collect();
    let expand = |mask: u32| -> u32 {
        let mut out = 0u32;
        let mut rest = mask;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= nbr_mask[x];
        }
        out
    };
    let ai = s.iter().position(|&v| v == a).unwrap();
    let bi = s.iter().position(|&v| v == b).unwrap();
    let final_list: u32 = 1 << t.alpha | 1 << t.beta;
    let goal = |profile: &[u32]| -> bool {
        let pa = profile[ai] & final_list;
        let pb = profile[bi] & final_list;
        pa == 1 << t.alpha
            && pb & (1 << t.beta) != 0
            && profile.iter().all(|&p| p & final_list != 0)
    };

    let start: Vec<u32> = s.iter().map(|&v| 1u32 << v).collect();
    let mut parent: HashMap<Vec<u32>, (Vec<u32>, u32)> = HashMap::new();
    parent.insert(start.clone(), (Vec::new(), 0));
    let mut frontier = vec![start.clone()];
    // The goal node is tracked outside the visited map; its profile may
    // coincide with an already-visited state.
    let mut found: Option<Vec<u32>> = None;
    'bfs: while !frontier.is_empty() {
        let mut next_frontier = Vec::new();
        for prof in &frontier {
            let imgs: Vec<u32> = prof.iter().map(|&m| expand(m)).collect();
            let union: u32 = imgs.iter().fold(0, |a, &x| a | x);
            // Try the goal transition first: final list {alpha, beta}.
            let final_prof: Vec<u32> = imgs.iter().map(|&m| m & final_list).collect();
            if goal(&final_prof) {
                found = Some(prof.clone());
                break 'bfs;
            }
            // Enumerate candidate next lists as subsets of the image union.
            let pool: Vec<usize> =
                (0..h.n()).filter(|&x| union >> x & 1 == 1).collect();
            for mask in 1u32..(1 << pool.len()) {
                let list: u32 = pool
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0u32, |acc, (_, &x)| acc | 1 << x);
                let next: Vec<u32> = imgs.iter().map(|&m| m & list).collect();
                if next.iter().any(|&m| m == 0) {
                    continue; // some member would be stranded
                }
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next.clone()) {
                    e.insert((prof.clone(), list));
                    next_frontier.push(next);
                    if parent.len() > SYNTHESIS_STATE_BUDGET {
                        return Err(GadgetError::SynthesisBudgetExceeded {
                            explored: parent.len(),
                        });
                    }
                }
            }
        }
        frontier = next_frontier;
    }
    let pre_goal = found.ok_or_else(|| GadgetError::MissingWalk(format!(
        "no distinguisher path for a={a}, b={b}"
    )))?;
    // Reconstruct the list sequence: the final list, then the chain that
    // led to the profile from which the goal transition fired.
    let mut rev_lists: Vec<u32> = vec![final_list];
    let mut cur = pre_goal;
    loop {
        let (prev, list) = parent[&cur].clone();
        if prev.is_empty() {
            break;
        }
        rev_lists.push(list);
        cur = prev;
    }
    rev_lists.reverse();
    let mut lists: Vec<BTreeSet<usize>> = vec![s.iter().copied().collect()];
    for mask in rev_lists {
        lists.push((0..h.n()).filter(|&x| mask >> x & 1 == 1).collect());
    }
    let last = lists.len() - 1;
    let gadget = path_gadget(h, lists, vec![("x".into(), 0), ("y".into(), last)])?;
    verify_distinguisher(&gadget, t, s, a, b)?;
    Ok(gadget)
}

/// Exhaustive check of the distinguisher contract.
pub fn verify_distinguisher(
    g: &Gadget,
    t: &CornerTriple,
    s: &[usize],
    a: usize,
    b: usize,
) -> Result<(), GadgetError> {
    let fail = |detail: String| {
        Err(GadgetError::VerificationFailed { name: format!("distinguisher {a}/{b}"), detail })
    };
    let x = g.interface_vertex("x");
    let y = g.interface_vertex("y");
    let sset: BTreeSet<usize> = s.iter().copied().collect();
    if g.lists[x] != sset {
        return fail("input list is not S".into());
    }
    if g.lists[y] != [t.alpha, t.beta].into_iter().collect() {
        return fail("output list is not {alpha, beta}".into());
    }
    if !g.relation.contains(&vec![a, t.alpha]) {
        return fail("a cannot reach alpha".into());
    }
    if !g.relation.contains(&vec![b, t.beta]) {
        return fail("b cannot reach beta".into());
    }
    for &c in s {
        if c != a && c != b && !g.relation.contains(&vec![c, t.alpha]) && !g.relation.contains(&vec![c, t.beta]) {
            return fail(format!("member {c} reaches neither endpoint"));
        }
    }
    if g.relation.contains(&vec![a, t.beta]) {
        return fail("a reaches beta".into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Detector
// ---------------------------------------------------------------------------

/// The detector: distinguishers for every other member of `S` share the
/// input `x_u`; their outputs feed an OR gadget whose free interface is
/// `c_u`. Mapping `x_u` to `u` forces `c_u` to `beta`.
pub fn build_detector(
    h: &Graph,
    t: &CornerTriple,
    s: &[usize],
    u: usize,
    g: usize,
) -> Result<Gadget, GadgetError> {
    let k = s.len();
    if k < 2 || !s.contains(&u) {
        return Err(GadgetError::PreconditionViolated("detector needs |S| >= 2 and u in S".into()));
    }
    let others: Vec<usize> = s.iter().copied().filter(|&w| w != u).collect();
    let mut dists = Vec::new();
    for &w in &others {
        let d = synthesize_distinguisher(h, t, s, u, w)?;
        let d = pad_back_to(h, t, d, g)?;
        dists.push(d);
    }
    let or = build_or_k(h, t, k, g)?;

    // Assemble: x_u, then each distinguisher interior + output, then the OR
    // tree with k-1 interfaces identified with the outputs.
    let mut lists: Vec<BTreeSet<usize>> = vec![s.iter().copied().collect()];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let x_u = 0usize;
    let mut outputs = Vec::new();
    for d in &dists {
        let base = lists.len();
        for l in &d.lists[1..] {
            lists.push(l.clone());
        }
        let len = d.lists.len();
        for i in 0..len - 1 {
            let uu = if i == 0 { x_u } else { base + i - 1 };
            let vv = base + i;
            edges.push((uu, vv));
        }
        outputs.push(base + len - 2);
    }
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &out_v) in outputs.iter().enumerate() {
        let leaf = or.interface_vertex(&format!("x{}", i + 1));
        if or.lists[leaf] != lists[out_v] {
            return Err(GadgetError::PreconditionViolated("OR leaf list mismatch".into()));
        }
        remap.insert(leaf, out_v);
    }
    let c_leaf = or.interface_vertex(&format!("x{k}"));
    for (i, l) in or.lists.iter().enumerate() {
        if !remap.contains_key(&i) {
            remap.insert(i, lists.len());
            lists.push(l.clone());
        }
    }
    for (a, bb) in or.graph.edges() {
        edges.push((remap[&a], remap[&bb]));
    }
    let c_u = remap[&c_leaf];
    let graph = Graph::from_edges(lists.len(), &edges);
    let gadget = make_gadget(
        h,
        graph,
        lists,
        vec![("x_u".into(), x_u), ("c_u".into(), c_u)],
    )?;
    verify_detector(&gadget, t, s, u, g)?;
    Ok(gadget)
}

fn pad_back_to(
    h: &Graph,
    t: &CornerTriple,
    gadget: Gadget,
    min_len: usize,
) -> Result<Gadget, GadgetError> {
    let cur = gadget.lists.len() - 1;
    if cur >= min_len {
        return Ok(gadget);
    }
    let need = min_len - cur;
    let pad = need + need % 2;
    let ext = extender_path(h, t, pad)?;
    // Rename interfaces to compose: gadget.out joins ext.in.
    let mut gg = gadget.clone();
    for e in gg.interface.iter_mut() {
        if e.0 == "x" {
            e.0 = "in".into();
        }
        if e.0 == "y" {
            e.0 = "out".into();
        }
    }
    let composed = compose_path_gadgets(&gg, &ext)?;
    let mut cc = composed.clone();
    for e in cc.interface.iter_mut() {
        if e.0 == "in" {
            e.0 = "x".into();
        }
        if e.0 == "out" {
            e.0 = "y".into();
        }
    }
    expect_relation(&cc, "padded distinguisher", &gadget.relation)?;
    Ok(cc)
}

/// Exhaustive check of the detector contract plus its spacing guarantees.
pub fn verify_detector(
    gadget: &Gadget,
    t: &CornerTriple,
    s: &[usize],
    u: usize,
    g: usize,
) -> Result<(), GadgetError> {
    let k = s.len();
    let fail = |detail: String| {
        Err(GadgetError::VerificationFailed { name: format!("detector u={u}"), detail })
    };
    let x_u = gadget.interface_vertex("x_u");
    let c_u = gadget.interface_vertex("c_u");
    if gadget.lists[x_u] != s.iter().copied().collect() {
        return fail("x_u list is not S".into());
    }
    if gadget.lists[c_u] != [t.alpha, t.beta].into_iter().collect() {
        return fail("c_u list is not {alpha, beta}".into());
    }
    for &sv in s {
        if !gadget.relation.contains(&vec![sv, t.beta]) {
            return fail(format!("({sv}, beta) missing"));
        }
        if sv != u && !gadget.relation.contains(&vec![sv, t.alpha]) {
            return fail(format!("({sv}, alpha) missing"));
        }
    }
    if gadget.relation.contains(&vec![u, t.alpha]) {
        return fail("(u, alpha) must be impossible".into());
    }
    // Structure: removing x_u leaves a tree; degrees and spacing.
    let rest: Vec<usize> = (0..gadget.graph.n()).filter(|&v| v != x_u).collect();
    let (without, _) = gadget.graph.induced(&rest);
    if !without.is_forest() || !without.is_connected() {
        return fail("detector minus x_u must be a tree".into());
    }
    if gadget.graph.degree(x_u) != k - 1 || gadget.graph.degree(c_u) != 1 {
        return fail("degree contract violated".into());
    }
    if (0..gadget.graph.n()).any(|v| v != x_u && gadget.graph.degree(v) > 3) {
        return fail("interior degree above three".into());
    }
    if let Some(girth) = gadget.graph.girth() {
        if girth < g {
            return fail(format!("girth {girth} below {g}"));
        }
    }
    let deg3: Vec<usize> = (0..gadget.graph.n())
        .filter(|&v| v != x_u && gadget.graph.degree(v) >= 3)
        .collect();
    for (i, &a) in deg3.iter().enumerate() {
        for &bb in deg3[i + 1..].iter().chain([x_u].iter()) {
            if gadget.graph.dist(a, bb).unwrap_or(usize::MAX) < g {
                return fail(format!("degree-3 vertices {a}, {bb} closer than {g}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The y-side path of the assignment gadget
// ---------------------------------------------------------------------------

/// Path from `c` (list `{alpha, beta}`) to `y` (list `{alpha, beta, gamma}`)
/// of length at least `g`: both endpoints move freely over `{alpha, beta}`,
/// `alpha` at `c` reaches `gamma`, and `beta` at `c` never does.
fn build_pu_path(h: &Graph, t: &CornerTriple, g: usize) -> Result<Gadget, GadgetError> {
    let core = match &t.case {
        TripleCase::C6 { w } => path_gadget(
            h,
            vec![wlist(w, &[1, 5]), wlist(w, &[2, 6]), wlist(w, &[1, 3, 5])],
            vec![("in".into(), 0), ("out".into(), 2)],
        )?,
        TripleCase::C8 { w } => path_gadget(
            h,
            vec![
                wlist(w, &[1, 5]),
                wlist(w, &[2, 6]),
                wlist(w, &[1, 3, 7]),
                wlist(w, &[2, 4, 6, 8]),
                wlist(w, &[1, 3, 5]),
            ],
            vec![("in".into(), 0), ("out".into(), 4)],
        )?,
        TripleCase::StronglyIncomparable { .. } => {
            let walks = t.triple_walks.as_ref().unwrap();
            let [xa, ya, za] = &walks[&t.alpha];
            let [xg, yg, zg] = &walks[&t.gamma];
            let p1 = build_walk_path(h, &[xa.clone(), ya.clone(), za.clone()], &[0, 1], &[2], true)?;
            let p2 = build_walk_path(
                h,
                &[xg.reversed(), yg.reversed(), zg.reversed()],
                &[0, 1],
                &[2],
                true,
            )?;
            let p3 = build_walk_path(h, &[xg.clone(), yg.clone(), zg.clone()], &[0, 1], &[2], true)?;
            compose_path_gadgets(&compose_path_gadgets(&p1, &p2)?, &p3)?
        }
    };
    let padded = pad_front_to(h, t, core, g)?;
    // (P1)-(P3): free movement on {alpha, beta} x {alpha, beta}; alpha
    // reaches gamma; beta never reaches gamma.
    for a in [t.alpha, t.beta] {
        for b in [t.alpha, t.beta] {
            if !padded.relation.contains(&vec![a, b]) {
                return Err(GadgetError::VerificationFailed {
                    name: "pu-path".into(),
                    detail: format!("({a}, {b}) missing"),
                });
            }
        }
    }
    if !padded.relation.contains(&vec![t.alpha, t.gamma]) {
        return Err(GadgetError::VerificationFailed {
            name: "pu-path".into(),
            detail: "(alpha, gamma) missing".into(),
        });
    }
    if padded.relation.contains(&vec![t.beta, t.gamma]) {
        return Err(GadgetError::VerificationFailed {
            name: "pu-path".into(),
            detail: "(beta, gamma) must be impossible".into(),
        });
    }
    Ok(padded)
}

// ---------------------------------------------------------------------------
// Assignment gadget
// ---------------------------------------------------------------------------

/// The assignment gadget `A_v` for `v` in the incomparable set `S`: special
/// vertices `x` (list `S`) and `y` (list `{alpha, beta, gamma}`) such that
/// `y = gamma` forces `x = v`, while `alpha`/`beta` at `y` leave `x` free.
pub fn build_assignment(
    h: &Graph,
    t: &CornerTriple,
    s: &[usize],
    v: usize,
    g: usize,
) -> Result<Gadget, GadgetError> {
    let k = s.len();
    if k < 2 || !s.contains(&v) {
        return Err(GadgetError::PreconditionViolated("assignment needs |S| >= 2 and v in S".into()));
    }
    let mut lists: Vec<BTreeSet<usize>> = vec![
        s.iter().copied().collect(),
        [t.alpha, t.beta, t.gamma].into_iter().collect(),
    ];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let (x, y) = (0usize, 1usize);
    for &u in s.iter().filter(|&&u| u != v) {
        // F_u = detector for u glued to one fresh copy of the c->y path.
        let det = build_detector(h, t, s, u, g)?;
        let pu = build_pu_path(h, t, g)?;
        let det_x = det.interface_vertex("x_u");
        let det_c = det.interface_vertex("c_u");
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        remap.insert(det_x, x);
        for (i, l) in det.lists.iter().enumerate() {
            if i != det_x {
                remap.insert(i, lists.len());
                lists.push(l.clone());
            }
        }
        for (a, bb) in det.graph.edges() {
            edges.push((remap[&a], remap[&bb]));
        }
        // Glue the path: position 0 joins c_u, final position joins y.
        let c_global = remap[&det_c];
        let plen = pu.lists.len();
        let mut prev = c_global;
        for (i, l) in pu.lists.iter().enumerate().skip(1) {
            let id = if i == plen - 1 {
                y
            } else {
                lists.push(l.clone());
                lists.len() - 1
            };
            edges.push((prev, id));
            prev = id;
        }
    }
    let graph = Graph::from_edges(lists.len(), &edges);
    let gadget = make_gadget(h, graph, lists, vec![("x".into(), x), ("y".into(), y)])?;
    verify_assignment(&gadget, t, s, v, g)?;
    Ok(gadget)
}

/// Exhaustive check of the assignment contract (A1)-(A7) plus the spacing
/// guarantees.
pub fn verify_assignment(
    gadget: &Gadget,
    t: &CornerTriple,
    s: &[usize],
    v: usize,
    g: usize,
) -> Result<(), GadgetError> {
    let k = s.len();
    let fail = |detail: String| {
        Err(GadgetError::VerificationFailed { name: format!("assignment v={v}"), detail })
    };
    let x = gadget.interface_vertex("x");
    let y = gadget.interface_vertex("y");
    // (A1)
    if gadget.lists[x] != s.iter().copied().collect()
        || gadget.lists[y] != [t.alpha, t.beta, t.gamma].into_iter().collect()
    {
        return fail("interface lists violate (A1)".into());
    }
    // (A2)
    for &u in s {
        for a in [t.alpha, t.beta] {
            if !gadget.relation.contains(&vec![u, a]) {
                return fail(format!("({u}, {a}) missing, violating (A2)"));
            }
        }
    }
    // (A3), (A4)
    if !gadget.relation.contains(&vec![v, t.gamma]) {
        return fail("(v, gamma) missing, violating (A3)".into());
    }
    for &u in s {
        if u != v && gadget.relation.contains(&vec![u, t.gamma]) {
            return fail(format!("({u}, gamma) possible, violating (A4)"));
        }
    }
    // (A5): removing x leaves a tree.
    let rest: Vec<usize> = (0..gadget.graph.n()).filter(|&w| w != x).collect();
    let (without, _) = gadget.graph.induced(&rest);
    if !without.is_forest() || !without.is_connected() {
        return fail("gadget minus x must be a tree, violating (A5)".into());
    }
    // (A6), (A7)
    if gadget.graph.degree(x) != (k - 1) * (k - 1) {
        return fail(format!(
            "deg(x) = {} instead of (|S|-1)^2 = {}",
            gadget.graph.degree(x),
            (k - 1) * (k - 1)
        ));
    }
    if gadget.graph.degree(y) != k - 1 {
        return fail(format!("deg(y) = {} instead of |S|-1", gadget.graph.degree(y)));
    }
    if (0..gadget.graph.n()).any(|w| w != x && w != y && gadget.graph.degree(w) > 3) {
        return fail("interior degree above three, violating (A7)".into());
    }
    // Spacing: girth and pairwise distances of degree-3 vertices, x, and y.
    if let Some(girth) = gadget.graph.girth() {
        if girth < g {
            return fail(format!("girth {girth} below {g}"));
        }
    }
    let mut special: Vec<usize> = (0..gadget.graph.n())
        .filter(|&w| w != x && w != y && gadget.graph.degree(w) >= 3)
        .collect();
    special.push(x);
    special.push(y);
    for (i, &a) in special.iter().enumerate() {
        for &bb in &special[i + 1..] {
            if gadget.graph.dist(a, bb).unwrap_or(usize::MAX) < g {
                return fail(format!("special vertices {a}, {bb} closer than {g}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Switching gadget
// ---------------------------------------------------------------------------

/// The switching gadget: a path with endpoints `p`, `r` (lists
/// `{alpha, beta}`) and an interior `q` (list `{alpha, beta, gamma}`);
/// mapping `p` to `alpha` and `r` to `beta` forces `q` to `gamma`, while
/// equal endpoint values avoid it. Both `q`-distances are at least `g/2`.
pub fn build_switching(h: &Graph, t: &CornerTriple, g: usize) -> Result<Gadget, GadgetError> {
    // Core path plus the q position inside it; the explicit cycle path is
    // shared by the C6 and C8 cases.
    let cycle_core = |w: &[usize]| -> (Vec<BTreeSet<usize>>, usize) {
        let wl = |picks: &[usize]| -> BTreeSet<usize> {
            picks.iter().map(|&i| w[i - 1]).collect()
        };
        (
            vec![wl(&[1, 5]), wl(&[2, 4]), wl(&[1, 3, 5]), wl(&[2, 4]), wl(&[1, 5])],
            2usize,
        )
    };
    let (core_lists, q_pos) = match &t.case {
        TripleCase::C6 { w } => cycle_core(&w[..]),
        TripleCase::C8 { w } => cycle_core(&w[..]),
        TripleCase::StronglyIncomparable { .. } => {
            let walks = t.triple_walks.as_ref().unwrap();
            let [xb, yb, zb] = &walks[&t.beta];
            let [xa, ya, za] = &walks[&t.alpha];
            let p1 = build_walk_path(h, &[xb.clone(), yb.clone(), zb.clone()], &[0, 1], &[2], true)?;
            let p2 = build_walk_path(
                h,
                &[xa.reversed(), ya.reversed(), za.reversed()],
                &[0, 1],
                &[2],
                true,
            )?;
            let (xw, yw) = &t.backward_pair;
            let p3 = build_walk_path(h, &[yw.clone(), xw.clone()], &[0], &[1], false)?;
            let q_pos = p1.lists.len() - 1;
            let comp = compose_path_gadgets(&compose_path_gadgets(&p1, &p2)?, &p3)?;
            (comp.lists.clone(), q_pos)
        }
    };
    // Pad both ends so dist(p, q) and dist(r, q) reach g/2 (2*dist >= g).
    let half = g.div_ceil(2);
    let front_need = half.saturating_sub(q_pos);
    let front_pad = front_need + front_need % 2;
    let back_need = half.saturating_sub(core_lists.len() - 1 - q_pos);
    let back_pad = back_need + back_need % 2;
    let ab: BTreeSet<usize> = [t.alpha, t.beta].into_iter().collect();
    let apbp: BTreeSet<usize> = [t.alpha_prime, t.beta_prime].into_iter().collect();
    let mut lists: Vec<BTreeSet<usize>> = Vec::new();
    for i in 0..front_pad {
        lists.push(if i % 2 == 0 { ab.clone() } else { apbp.clone() });
    }
    let q = front_pad + q_pos;
    lists.extend(core_lists);
    for i in 0..back_pad {
        lists.push(if i % 2 == 1 { ab.clone() } else { apbp.clone() });
    }
    let last = lists.len() - 1;
    let gadget = path_gadget(
        h,
        lists,
        vec![("p".into(), 0), ("q".into(), q), ("r".into(), last)],
    )?;
    verify_switching(&gadget, t, g)?;
    Ok(gadget)
}

/// Exhaustive check of the switching contract (S1)-(S4).
pub fn verify_switching(gadget: &Gadget, t: &CornerTriple, g: usize) -> Result<(), GadgetError> {
    let fail = |detail: String| {
        Err(GadgetError::VerificationFailed { name: "switching".into(), detail })
    };
    let p = gadget.interface_vertex("p");
    let q = gadget.interface_vertex("q");
    let r = gadget.interface_vertex("r");
    let ab: BTreeSet<usize> = [t.alpha, t.beta].into_iter().collect();
    if gadget.lists[p] != ab || gadget.lists[r] != ab {
        return fail("endpoint lists violate (S1)".into());
    }
    if gadget.lists[q] != [t.alpha, t.beta, t.gamma].into_iter().collect() {
        return fail("q list violates (S1)".into());
    }
    // (S2): equal endpoints avoid gamma.
    for a in [t.alpha, t.beta] {
        if !gadget.relation.iter().any(|tup| tup[0] == a && tup[2] == a && tup[1] != t.gamma) {
            return fail(format!("no gamma-free homomorphism with both endpoints {a}"));
        }
    }
    // (S3): the switch is realizable.
    if !gadget.relation.contains(&vec![t.alpha, t.gamma, t.beta]) {
        return fail("(alpha, gamma, beta) missing, violating (S3)".into());
    }
    // (S4): switching forces gamma.
    for tup in &gadget.relation {
        if tup[0] == t.alpha && tup[2] == t.beta && tup[1] != t.gamma {
            return fail(format!("switch realizable with q = {}, violating (S4)", tup[1]));
        }
    }
    let dpq = gadget.graph.dist(p, q).unwrap();
    let drq = gadget.graph.dist(r, q).unwrap();
    if 2 * dpq < g || 2 * drq < g {
        return fail(format!("q-distances ({dpq}, {drq}) below half of {g}"));
    }
    Ok(())
}
