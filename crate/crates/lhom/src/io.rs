//! Text formats: graphs, list instances, layouts, feedback sets, BCSP as
//! JSON, DIMACS CNF, and DOT export.
//!
//! Graph files name vertices by label. The first line is `n m`, followed by
//! `m` lines `u v`; a loop is `u u`. Lines starting with `#` are comments.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gen::Cnf;
use crate::graph::Graph;
use crate::instance::{BcspInstance, ListInstance};
use crate::layouts::{FeedbackSet, LinearLayout};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

pub fn parse_graph(text: &str) -> Result<Graph, IoError> {
    let mut lines = content_lines(text);
    let header = lines.next().ok_or_else(|| IoError::Parse("empty graph file".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| IoError::Parse("bad vertex count".into()))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| IoError::Parse("bad edge count".into()))?;
    let mut raw_edges: Vec<(String, String)> = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or_else(|| IoError::Parse("missing edge line".into()))?;
        let mut it = line.split_whitespace();
        let u = it.next().ok_or_else(|| IoError::Parse("bad edge line".into()))?;
        let v = it.next().ok_or_else(|| IoError::Parse("bad edge line".into()))?;
        raw_edges.push((u.to_string(), v.to_string()));
    }
    // Pure-integer token sets address vertices directly; otherwise labels in
    // order of first appearance.
    let all_ints = raw_edges
        .iter()
        .flat_map(|(u, v)| [u, v])
        .all(|t| t.parse::<usize>().is_ok_and(|x| x < n));
    let mut edges = Vec::with_capacity(m);
    if all_ints {
        for (u, v) in &raw_edges {
            edges.push((u.parse().unwrap(), v.parse().unwrap()));
        }
        Ok(Graph::from_edges(n, &edges))
    } else {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut labels: Vec<String> = Vec::new();
        let id = |t: &str, index: &mut BTreeMap<String, usize>, labels: &mut Vec<String>| {
            *index.entry(t.to_string()).or_insert_with(|| {
                labels.push(t.to_string());
                labels.len() - 1
            })
        };
        for (u, v) in &raw_edges {
            let iu = id(u, &mut index, &mut labels);
            let iv = id(v, &mut index, &mut labels);
            edges.push((iu, iv));
        }
        if labels.len() > n {
            return Err(IoError::Parse(format!(
                "{} distinct labels but header says {n} vertices",
                labels.len()
            )));
        }
        while labels.len() < n {
            labels.push(format!("_v{}", labels.len()));
        }
        Ok(Graph::from_edges(n, &edges).with_labels(labels))
    }
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", g.label(u), g.label(v)));
    }
    out
}

// ---------------------------------------------------------------------------
// List instances
// ---------------------------------------------------------------------------

/// Instance format: the graph block of `g`, a `target <file>` line naming the
/// target graph file, then `v: a b c` list lines addressing target labels.
/// The target graph itself is resolved by the caller (the text only carries
/// the path), so parsing takes the loaded target as an argument.
pub fn parse_list_instance(text: &str, h: Graph) -> Result<ListInstance, IoError> {
    let mut graph_part = String::new();
    let mut list_lines: Vec<&str> = Vec::new();
    let mut seen_target = false;
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with("target ") {
            seen_target = true;
            continue;
        }
        if !seen_target {
            graph_part.push_str(line);
            graph_part.push('\n');
        } else if !t.is_empty() && !t.starts_with('#') {
            list_lines.push(t);
        }
    }
    if !seen_target {
        return Err(IoError::Parse("missing target line".into()));
    }
    let g = parse_graph(&graph_part)?;
    let mut lists: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.n()];
    for line in list_lines {
        let (v_part, rest) = line
            .split_once(':')
            .ok_or_else(|| IoError::Parse(format!("bad list line: {line}")))?;
        let v = g
            .vertex_by_label(v_part.trim())
            .ok_or_else(|| IoError::Parse(format!("unknown instance vertex {v_part}")))?;
        for tok in rest.split_whitespace() {
            let x = h
                .vertex_by_label(tok)
                .ok_or_else(|| IoError::Parse(format!("unknown target vertex {tok}")))?;
            lists[v].insert(x);
        }
    }
    Ok(ListInstance::new(g, h, lists))
}

/// Extracts the `target <file>` path from an instance file.
pub fn instance_target_path(text: &str) -> Result<String, IoError> {
    for line in content_lines(text) {
        if let Some(p) = line.strip_prefix("target ") {
            return Ok(p.trim().to_string());
        }
    }
    Err(IoError::Parse("missing target line".into()))
}

pub fn write_list_instance(inst: &ListInstance, target_path: &str) -> String {
    let mut out = write_graph(&inst.g);
    out.push_str(&format!("target {target_path}\n"));
    for v in 0..inst.g.n() {
        let vals: Vec<String> =
            inst.lists[v].iter().map(|&x| inst.h.label(x)).collect();
        out.push_str(&format!("{}: {}\n", inst.g.label(v), vals.join(" ")));
    }
    out
}

// ---------------------------------------------------------------------------
// Layouts and feedback sets
// ---------------------------------------------------------------------------

/// Layout file: one line of vertex labels in order, optionally preceded by a
/// `# width: w` comment carrying the declared width.
pub fn parse_layout(text: &str, g: &Graph) -> Result<(Vec<usize>, Option<usize>), IoError> {
    let mut declared = None;
    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("# width:") {
            declared = rest.trim().parse().ok();
        }
    }
    let line = content_lines(text)
        .next()
        .ok_or_else(|| IoError::Parse("empty layout file".into()))?;
    let mut order = Vec::new();
    for tok in line.split_whitespace() {
        let v = g
            .vertex_by_label(tok)
            .ok_or_else(|| IoError::Parse(format!("unknown vertex {tok}")))?;
        order.push(v);
    }
    Ok((order, declared))
}

pub fn write_layout(g: &Graph, l: &LinearLayout) -> String {
    let labels: Vec<String> = l.order.iter().map(|&v| g.label(v)).collect();
    format!("# width: {}\n{}\n", l.width, labels.join(" "))
}

/// Feedback-set file: a `fvs` header line, then one line of vertex labels.
pub fn parse_fvs(text: &str, g: &Graph) -> Result<FeedbackSet, IoError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some("fvs") => {}
        _ => return Err(IoError::Parse("missing fvs header".into())),
    }
    let mut vertices = BTreeSet::new();
    if let Some(line) = lines.next() {
        for tok in line.split_whitespace() {
            let v = g
                .vertex_by_label(tok)
                .ok_or_else(|| IoError::Parse(format!("unknown vertex {tok}")))?;
            vertices.insert(v);
        }
    }
    Ok(FeedbackSet { vertices })
}

pub fn write_fvs(g: &Graph, f: &FeedbackSet) -> String {
    let labels: Vec<String> = f.vertices.iter().map(|&v| g.label(v)).collect();
    format!("fvs\n{}\n", labels.join(" "))
}

// ---------------------------------------------------------------------------
// BCSP as JSON
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BcspJson {
    variables: Vec<String>,
    domains: Vec<Vec<u32>>,
    constraints: Vec<BcspConstraintJson>,
}

#[derive(Serialize, Deserialize)]
struct BcspConstraintJson {
    u: String,
    v: String,
    allowed: Vec<(u32, u32)>,
}

pub fn write_bcsp(b: &BcspInstance) -> String {
    let doc = BcspJson {
        variables: b.names().to_vec(),
        domains: (0..b.num_vars()).map(|v| b.domain(v).iter().copied().collect()).collect(),
        constraints: b
            .constraints()
            .iter()
            .map(|(&(u, v), s)| BcspConstraintJson {
                u: b.names()[u].clone(),
                v: b.names()[v].clone(),
                allowed: s.iter().copied().collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("bcsp serialization cannot fail")
}

pub fn parse_bcsp(text: &str) -> Result<BcspInstance, IoError> {
    let doc: BcspJson = serde_json::from_str(text)?;
    if doc.domains.len() != doc.variables.len() {
        return Err(IoError::Parse("domain count differs from variable count".into()));
    }
    let index: BTreeMap<&str, usize> = doc
        .variables
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    if index.len() != doc.variables.len() {
        return Err(IoError::Parse("duplicate variable names".into()));
    }
    let domains: Vec<BTreeSet<u32>> =
        doc.domains.iter().map(|d| d.iter().copied().collect()).collect();
    if domains.iter().any(|d| d.contains(&0)) {
        return Err(IoError::Parse("domain values must be positive".into()));
    }
    let mut b = BcspInstance::new(doc.variables.clone(), domains);
    for c in &doc.constraints {
        let u = *index
            .get(c.u.as_str())
            .ok_or_else(|| IoError::Parse(format!("unknown variable {}", c.u)))?;
        let v = *index
            .get(c.v.as_str())
            .ok_or_else(|| IoError::Parse(format!("unknown variable {}", c.v)))?;
        if u == v {
            return Err(IoError::Parse("constraint joins a variable with itself".into()));
        }
        b.set_constraint(u, v, c.allowed.iter().copied().collect());
    }
    Ok(b)
}

// ---------------------------------------------------------------------------
// DIMACS CNF
// ---------------------------------------------------------------------------

pub fn parse_dimacs(text: &str) -> Result<Cnf, IoError> {
    let mut num_vars = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            let mut it = rest.split_whitespace();
            if it.next() != Some("cnf") {
                return Err(IoError::Parse("expected 'p cnf n m' header".into()));
            }
            num_vars = it.next().and_then(|x| x.parse().ok());
            continue;
        }
        for tok in t.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| IoError::Parse(format!("bad literal {tok}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let num_vars =
        num_vars.ok_or_else(|| IoError::Parse("missing 'p cnf' header".into()))?;
    for c in &clauses {
        for &lit in c {
            let v = lit.unsigned_abs() as usize;
            if v == 0 || v > num_vars {
                return Err(IoError::Parse(format!("literal {lit} out of range")));
            }
        }
    }
    Ok(Cnf { num_vars, clauses })
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for lit in c {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

/// DOT rendering of an instance graph with lists as node annotations.
pub fn write_dot(inst: &ListInstance) -> String {
    let mut out = String::from("graph instance {\n  node [shape=circle];\n");
    for v in 0..inst.g.n() {
        let list: Vec<String> = inst.lists[v].iter().map(|&x| inst.h.label(x)).collect();
        out.push_str(&format!(
            "  v{} [label=\"{}\\n{{{}}}\"];\n",
            v,
            inst.g.label(v),
            list.join(",")
        ));
    }
    for (u, v) in inst.g.edges() {
        out.push_str(&format!("  v{u} -- v{v};\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle;
    use proptest::prelude::*;

    #[test]
    fn graph_round_trip_with_labels() {
        let g = cycle(6).with_labels((1..=6).map(|i| format!("w{i}")).collect());
        let text = write_graph(&g);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back.n(), 6);
        assert_eq!(back.m(), 6);
        // Indices follow first appearance in the edge list, but the labeled
        // structure is preserved.
        for i in 1..=6 {
            let u = back.vertex_by_label(&format!("w{i}")).unwrap();
            let v = back.vertex_by_label(&format!("w{}", i % 6 + 1)).unwrap();
            assert!(back.has_edge(u, v));
        }
        assert!(crate::graph::isomorphic(&back, &cycle(6)));
    }

    #[test]
    fn graph_parse_integer_mode_and_comments() {
        let text = "# a triangle with a loop\n3 4\n0 1\n1 2\n0 2\n2 2\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n(), 3);
        assert!(g.has_loop(2));
    }

    #[test]
    fn list_instance_round_trip() {
        let h = cycle(6).with_labels((1..=6).map(|i| format!("w{i}")).collect());
        let g = Graph::from_edges(2, &[(0, 1)])
            .with_labels(vec!["u".into(), "v".into()]);
        let lists = vec![
            [0usize].into_iter().collect(),
            [1usize, 3].into_iter().collect(),
        ];
        let inst = ListInstance::new(g, h.clone(), lists);
        let text = write_list_instance(&inst, "h.graph");
        assert_eq!(instance_target_path(&text).unwrap(), "h.graph");
        let back = parse_list_instance(&text, h).unwrap();
        assert_eq!(back.lists, inst.lists);
        assert_eq!(back.g.m(), 1);
    }

    #[test]
    fn layout_and_fvs_round_trips() {
        let g = cycle(5);
        let l = crate::layouts::exact_cutwidth(&g, 20).unwrap();
        let text = write_layout(&g, &l);
        let (order, declared) = parse_layout(&text, &g).unwrap();
        assert_eq!(order, l.order);
        assert_eq!(declared, Some(l.width));

        let f = crate::layouts::exact_fvs(&g, 25).unwrap();
        let text = write_fvs(&g, &f);
        let back = parse_fvs(&text, &g).unwrap();
        assert_eq!(back.vertices, f.vertices);
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c comment\np cnf 3 2\n1 -2 0\n2 3 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(cnf.num_vars, 3);
        assert_eq!(cnf.clauses, vec![vec![1, -2], vec![2, 3]]);
        let back = parse_dimacs(&write_dimacs(&cnf)).unwrap();
        assert_eq!(back, cnf);
    }

    proptest! {
        #[test]
        fn bcsp_json_round_trips(seed in 0u64..500) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b = crate::gen::random_bcsp(&mut rng, 5, 4, 0.5);
            let text = write_bcsp(&b);
            let back = parse_bcsp(&text).unwrap();
            prop_assert_eq!(back, b);
        }

        #[test]
        fn graph_text_round_trips(seed in 0u64..500) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = crate::gen::random_graph(&mut rng, 7, 0.4, true);
            let text = write_graph(&g);
            let back = parse_graph(&text).unwrap();
            prop_assert_eq!(back.n(), g.n());
            prop_assert_eq!(back.edges(), g.edges());
        }
    }

    use crate::graph::Graph;
}
