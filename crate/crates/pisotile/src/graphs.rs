//! The admissibility automaton and the boundary graph.
//!
//! The admissibility graph realizes the Parry condition as a finite
//! automaton on nodes {1..n}. The boundary graph has nodes [a, x, b] with
//! integer coordinates x = K + L*beta; its infinite paths describe the
//! points of the tile intersections T^(a) cap (T^(b) + phi(x)), one triplet
//! per translate pair. Candidates are enumerated
//! over an integer lattice box derived from |x| < 1 and the conjugate bound,
//! filtered exactly, wired by the edge conditions, and pruned to the nodes
//! that carry an infinite path.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numeration::{density_report, Splitting};
use crate::qfield::{PisotQuad, QuadElem};

/// The admissibility automaton: from node a there are t_a edges labelled
/// 0..t_a-1 to node 1 and one edge labelled t_a to node a+1; the closing
/// edge goes from node n to node m+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmGraph {
    pub n: usize,
    pub m: usize,
    pub t: Vec<i64>,
    edges: Vec<(usize, i64, usize)>,
}

impl AdmGraph {
    pub fn new(ctx: &PisotQuad) -> AdmGraph {
        let parry = ctx.parry();
        let n = parry.n();
        let m = parry.m;
        let mut edges = Vec::new();
        for a in 1..=n {
            let t = parry.t[a - 1];
            for label in 0..t {
                edges.push((a, label, 1));
            }
            let target = if a < n { a + 1 } else { m + 1 };
            edges.push((a, t, target));
        }
        edges.sort_unstable();
        edges.dedup();
        AdmGraph { n, m, t: parry.t.clone(), edges }
    }

    pub fn edges(&self) -> &[(usize, i64, usize)] {
        &self.edges
    }

    /// Deterministic transition; `None` rejects.
    pub fn delta(&self, node: usize, digit: i64) -> Option<usize> {
        let t = *self.t.get(node - 1)?;
        if digit < 0 || digit > t {
            None
        } else if digit < t {
            Some(1)
        } else if node < self.n {
            Some(node + 1)
        } else {
            Some(self.m + 1)
        }
    }

    /// Edges pointing into `node`, as (source, label) pairs.
    pub fn incoming(&self, node: usize) -> Vec<(usize, i64)> {
        self.edges
            .iter()
            .filter(|&&(_, _, to)| to == node)
            .map(|&(from, label, _)| (from, label))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph admissibility {\n  rankdir=LR;\n");
        for a in 1..=self.n {
            out.push_str(&format!("  n{a} [label=\"{a}\"];\n"));
        }
        for &(from, label, to) in &self.edges {
            out.push_str(&format!("  n{from} -> n{to} [label=\"{label}\"];\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let dto = AdmGraphJson {
            n: self.n,
            m: self.m,
            t: self.t.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(from, label, to)| AdmEdgeJson { from, label, to })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("adm graph serializes")
    }

    pub fn from_json(text: &str) -> Result<AdmGraph, Error> {
        let dto: AdmGraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if dto.n == 0 || dto.m >= dto.n || dto.t.len() != dto.n {
            return Err(Error::Parse("inconsistent admissibility graph header".into()));
        }
        let mut edges = Vec::with_capacity(dto.edges.len());
        for e in dto.edges {
            if e.from == 0 || e.from > dto.n || e.to == 0 || e.to > dto.n {
                return Err(Error::Parse("edge endpoint out of range".into()));
            }
            edges.push((e.from, e.label, e.to));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(AdmGraph { n: dto.n, m: dto.m, t: dto.t, edges })
    }
}

#[derive(Serialize, Deserialize)]
struct AdmGraphJson {
    n: usize,
    m: usize,
    t: Vec<i64>,
    edges: Vec<AdmEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct AdmEdgeJson {
    from: usize,
    label: i64,
    to: usize,
}

/// A boundary-graph node [a, x, b] with x = K + L*beta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryNode {
    pub a: usize,
    pub k: i64,
    pub l: i64,
    pub b: usize,
}

impl BoundaryNode {
    pub fn x(&self, ctx: &PisotQuad) -> QuadElem {
        QuadElem::from_pair(self.k, self.l, ctx.coeffs())
    }

    /// The involution [a, x, b] -> [b, -x, a].
    pub fn mirrored(&self) -> BoundaryNode {
        BoundaryNode { a: self.b, k: -self.k, l: -self.l, b: self.a }
    }

    pub fn render(&self) -> String {
        format!("[{}, {}, {}]", self.a, render_x(self.k, self.l), self.b)
    }
}

/// Exact coordinates "K+L*B" (or "K-L*B"), always both terms.
pub fn render_x(k: i64, l: i64) -> String {
    if l < 0 {
        format!("{}-{}*B", k, -l)
    } else {
        format!("{k}+{l}*B")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryEdge {
    pub from: usize,
    pub p: i64,
    pub q: i64,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryGraph {
    pub nodes: Vec<BoundaryNode>,
    pub edges: Vec<BoundaryEdge>,
    out: Vec<Vec<usize>>,
}

impl BoundaryGraph {
    fn from_parts(mut nodes: Vec<BoundaryNode>, edges: Vec<(BoundaryNode, i64, i64, BoundaryNode)>) -> BoundaryGraph {
        nodes.sort_unstable();
        nodes.dedup();
        let index: HashMap<BoundaryNode, usize> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut es: Vec<BoundaryEdge> = edges
            .into_iter()
            .map(|(f, p, q, t)| BoundaryEdge { from: index[&f], p, q, to: index[&t] })
            .collect();
        es.sort_unstable();
        es.dedup();
        let mut out = vec![Vec::new(); nodes.len()];
        for (i, e) in es.iter().enumerate() {
            out[e.from].push(i);
        }
        BoundaryGraph { nodes, edges: es, out }
    }

    pub fn node_index(&self, node: &BoundaryNode) -> Option<usize> {
        self.nodes.binary_search(node).ok()
    }

    pub fn outgoing(&self, node_idx: usize) -> impl Iterator<Item = &BoundaryEdge> {
        self.out[node_idx].iter().map(move |&i| &self.edges[i])
    }

    /// Start nodes of the gamma computation: 0 <= x < T^(b-1)(1), and a < b
    /// when x = 0.
    pub fn start_nodes(&self, ctx: &PisotQuad) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let x = node.x(ctx);
            let sgn = x.sign();
            if sgn < 0 {
                continue;
            }
            if sgn == 0 && node.a >= node.b {
                continue;
            }
            if x.cmp_same_ctx(ctx.orbit_value(node.b)) == Ordering::Less {
                out.push(i);
            }
        }
        out
    }

    /// Node indices reachable from the given starts.
    pub fn reachable(&self, starts: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = starts.iter().copied().collect();
        for &s in starts {
            seen[s] = true;
        }
        while let Some(v) = queue.pop_front() {
            for e in self.outgoing(v) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph boundary {\n  rankdir=LR;\n");
        for (i, node) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{}\"];\n", node.render()));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"({},{})\"];\n",
                e.from, e.to, e.p, e.q
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let dto = BoundaryGraphJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| BoundaryNodeJson { a: n.a, x: XJson { k: n.k, l: n.l }, b: n.b })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| BoundaryEdgeJson { from: e.from, p: e.p, q: e.q, to: e.to })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("boundary graph serializes")
    }

    pub fn from_json(text: &str) -> Result<BoundaryGraph, Error> {
        let dto: BoundaryGraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let nodes: Vec<BoundaryNode> = dto
            .nodes
            .iter()
            .map(|n| BoundaryNode { a: n.a, k: n.x.k, l: n.x.l, b: n.b })
            .collect();
        for e in &dto.edges {
            if e.from >= nodes.len() || e.to >= nodes.len() {
                return Err(Error::Parse("edge endpoint out of range".into()));
            }
        }
        let edges = dto
            .edges
            .iter()
            .map(|e| (nodes[e.from], e.p, e.q, nodes[e.to]))
            .collect();
        Ok(BoundaryGraph::from_parts(nodes, edges))
    }
}

#[derive(Serialize, Deserialize)]
struct BoundaryGraphJson {
    nodes: Vec<BoundaryNodeJson>,
    edges: Vec<BoundaryEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct BoundaryNodeJson {
    a: usize,
    x: XJson,
    b: usize,
}

#[derive(Serialize, Deserialize)]
struct XJson {
    #[serde(rename = "K")]
    k: i64,
    #[serde(rename = "L")]
    l: i64,
}

#[derive(Serialize, Deserialize)]
struct BoundaryEdgeJson {
    from: usize,
    p: i64,
    q: i64,
    to: usize,
}

/// Checks the hypotheses that reduce the integrality condition to Z[beta]:
/// every prime above beta splits with e = f = 1. Units skip the check.
fn check_lattice_hypotheses(ctx: &PisotQuad) -> Result<(), Error> {
    if ctx.is_unit() {
        return Ok(());
    }
    let report = density_report(ctx);
    for class in &report.per_prime {
        if class.splitting != Splitting::Split {
            return Err(Error::HypothesesFail { prime: class.p });
        }
    }
    Ok(())
}

/// All triplets [a, x, b] with x = K + L*beta satisfying the exact node
/// conditions: -T^(a-1)(1) < x < T^(b-1)(1) (with a != b when x = 0) and
/// |conj(x)| <= floor(beta)/(1 - |beta_2|).
pub fn candidate_nodes(ctx: &PisotQuad) -> Result<Vec<BoundaryNode>, Error> {
    check_lattice_hypotheses(ctx)?;
    let (k_max, l_max) = lattice_box(ctx);
    let n = ctx.n();
    // conjugate bound: |K + L*beta_2| * (1 - |beta_2|) <= floor(beta)
    let one_minus_abs_conj = ctx.one() - ctx.conj_abs();
    let digit_bound = ctx.from_int(ctx.digit_max());
    let mut out = Vec::new();
    for l in -l_max..=l_max {
        for k in -k_max..=k_max {
            let x = QuadElem::from_pair(k, l, ctx.coeffs());
            // |x| < 1 is necessary for every (a, b) pair
            if x.abs().cmp_int(1) != Ordering::Less {
                continue;
            }
            let conj_scaled = x.conj().abs() * &one_minus_abs_conj;
            if conj_scaled.cmp_same_ctx(&digit_bound) == Ordering::Greater {
                continue;
            }
            for a in 1..=n {
                let neg_ta = -ctx.orbit_value(a).clone();
                if x.cmp_same_ctx(&neg_ta) != Ordering::Greater {
                    continue;
                }
                for b in 1..=n {
                    if x.is_zero() && a == b {
                        continue;
                    }
                    if x.cmp_same_ctx(ctx.orbit_value(b)) == Ordering::Less {
                        out.push(BoundaryNode { a, k, l, b });
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Integer box bounds (K, L) derived from |x| <= 1 and the conjugate bound,
/// solved through an outward-rounded beta enclosure and enlarged by one
/// lattice unit.
pub(crate) fn lattice_box(ctx: &PisotQuad) -> (i64, i64) {
    let (blo, bhi) = crate::qfield::beta_bracket(ctx.coeffs(), 32);
    let beta_hi = bhi.to_f64().unwrap();
    let beta_lo = blo.to_f64().unwrap();
    let conj_abs = ctx.conj_abs().to_f64();
    let c = ctx.digit_max() as f64 / (1.0 - conj_abs);
    // beta - beta_2 = sqrt(disc); rounded down through the enclosure
    let gap = if ctx.conj_negative() { beta_lo + conj_abs } else { beta_lo - conj_abs };
    let l_max = ((1.0 + c) / gap).floor() as i64 + 1;
    let k_max = ((c * beta_hi + conj_abs) / gap).floor() as i64 + 1;
    (k_max, l_max)
}

/// Builds the boundary graph: candidate triplets, edges from the exact
/// conditions x1 = (x + q - p)/beta with admissibility edges a1 -> a and
/// b1 -> b, then recursive removal of nodes without outgoing edges.
pub fn boundary_graph(ctx: &PisotQuad) -> Result<BoundaryGraph, Error> {
    let candidates = candidate_nodes(ctx)?;
    let adm = AdmGraph::new(ctx);
    let index: HashMap<BoundaryNode, usize> =
        candidates.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let b_coeff = ctx.b();
    let a_coeff = ctx.a();

    // incoming adjacency of the admissibility graph, per node
    let incoming: Vec<Vec<(usize, i64)>> =
        (0..=ctx.n()).map(|v| if v == 0 { Vec::new() } else { adm.incoming(v) }).collect();

    let mut edges: Vec<(usize, i64, i64, usize)> = Vec::new();
    for (i, node) in candidates.iter().enumerate() {
        for &(a1, p) in &incoming[node.a] {
            for &(b1, q) in &incoming[node.b] {
                // x1 = (x + q - p) / beta stays in Z[beta] iff b | (K + q - p)
                let u = node.k + q - p;
                if u.rem_euclid(b_coeff.abs()) != 0 {
                    continue;
                }
                let l1 = u / b_coeff;
                let k1 = node.l - l1 * a_coeff;
                let target = BoundaryNode { a: a1, k: k1, l: l1, b: b1 };
                if let Some(&j) = index.get(&target) {
                    edges.push((i, p, q, j));
                }
            }
        }
    }

    // prune nodes with no outgoing edges to a fixed point
    let mut alive = vec![true; candidates.len()];
    loop {
        let mut out_deg = vec![0usize; candidates.len()];
        for &(f, _, _, t) in &edges {
            if alive[f] && alive[t] {
                out_deg[f] += 1;
            }
        }
        let mut changed = false;
        for i in 0..candidates.len() {
            if alive[i] && out_deg[i] == 0 {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let nodes: Vec<BoundaryNode> =
        candidates.iter().enumerate().filter(|&(i, _)| alive[i]).map(|(_, &n)| n).collect();
    let kept: Vec<(BoundaryNode, i64, i64, BoundaryNode)> = edges
        .into_iter()
        .filter(|&(f, _, _, t)| alive[f] && alive[t])
        .map(|(f, p, q, t)| (candidates[f], p, q, candidates[t]))
        .collect();
    Ok(BoundaryGraph::from_parts(nodes, kept))
}

/// A plain digit-labelled graph used for attractor computations: per-node
/// sorted edge lists (digit, target).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitGraph {
    pub edges: Vec<Vec<(i64, usize)>>,
}

impl DigitGraph {
    pub fn node_count(&self) -> usize {
        self.edges.len()
    }

    pub fn sorted(mut self) -> Self {
        for v in &mut self.edges {
            v.sort_unstable();
            v.dedup();
        }
        self
    }

    /// Labels negated; value sets are negated pointwise.
    pub fn negated(&self) -> DigitGraph {
        DigitGraph {
            edges: self
                .edges
                .iter()
                .map(|es| es.iter().map(|&(d, t)| (-d, t)).collect())
                .collect(),
        }
        .sorted()
    }
}

impl AdmGraph {
    /// Graph whose node v emits digit eps to w when w -> v is an
    /// admissibility edge labelled eps. Its value set from node a is the
    /// real projection of the complete central subtile T^(a).
    pub fn reversed_digit_graph(&self) -> DigitGraph {
        let mut edges = vec![Vec::new(); self.n];
        for &(from, label, to) in &self.edges {
            edges[to - 1].push((label, from - 1));
        }
        DigitGraph { edges }.sorted()
    }
}

impl BoundaryGraph {
    /// First coordinates of the edge labels; the value set from a node is
    /// the real projection of its tile intersection.
    pub fn first_digit_graph(&self) -> DigitGraph {
        let mut edges = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            edges[e.from].push((e.p, e.to));
        }
        DigitGraph { edges }.sorted()
    }

    /// Second coordinates, for the involution cross-checks.
    pub fn second_digit_graph(&self) -> DigitGraph {
        let mut edges = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            edges[e.from].push((e.q, e.to));
        }
        DigitGraph { edges }.sorted()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ctx(a: i64, b: i64) -> PisotQuad {
        PisotQuad::new(a, b).unwrap()
    }

    #[test]
    fn adm_graph_10_3() {
        let g = AdmGraph::new(&ctx(10, 3));
        assert_eq!(g.n, 2);
        // node 1: 0..9 -> 1, 10 -> 2; node 2: 0,1 -> 1, 2 -> 1
        for d in 0..10 {
            assert_eq!(g.delta(1, d), Some(1));
        }
        assert_eq!(g.delta(1, 10), Some(2));
        assert_eq!(g.delta(1, 11), None);
        assert_eq!(g.delta(2, 0), Some(1));
        assert_eq!(g.delta(2, 1), Some(1));
        assert_eq!(g.delta(2, 2), Some(1));
        assert_eq!(g.delta(2, 3), None);
        assert_eq!(g.edges().len(), 14);
    }

    #[test]
    fn adm_graph_golden_and_4_3() {
        let g = AdmGraph::new(&ctx(1, 1));
        assert_eq!(g.delta(1, 0), Some(1));
        assert_eq!(g.delta(1, 1), Some(2));
        assert_eq!(g.delta(2, 0), Some(1));
        assert_eq!(g.delta(2, 1), None);

        let h = AdmGraph::new(&ctx(4, 3));
        // node 2 sends labels {0,1,2} to node 1
        let outs: Vec<_> = h.edges().iter().filter(|e| e.0 == 2).collect();
        assert_eq!(outs.len(), 3);
        assert!(outs.iter().all(|e| e.2 == 1 && (0..=2).contains(&e.1)));
    }

    #[test]
    fn adm_graph_nonsimple() {
        // (3,-1): t = (2,1), m = 1, closing edge from node 2 to node 2
        let g = AdmGraph::new(&ctx(3, -1));
        assert_eq!(g.m, 1);
        assert_eq!(g.delta(2, 1), Some(2));
        assert_eq!(g.delta(2, 0), Some(1));
    }

    #[test]
    fn candidate_x_values() {
        let p = ctx(4, 3);
        let cands = candidate_nodes(&p).unwrap();
        let xs: BTreeSet<(i64, i64)> = cands.iter().map(|c| (c.k, c.l)).collect();
        let expected: BTreeSet<(i64, i64)> = [
            (0, 0),
            (-4, 1),
            (4, -1),
            (5, -1),
            (-5, 1),
            (-10, 2),
            (10, -2),
            (-9, 2),
            (9, -2),
        ]
        .into_iter()
        .collect();
        assert_eq!(xs, expected);
        // [1, 0, 1] is excluded by N1
        assert!(!cands.contains(&BoundaryNode { a: 1, k: 0, l: 0, b: 1 }));

        let q = ctx(10, 3);
        let xs103: BTreeSet<(i64, i64)> =
            candidate_nodes(&q).unwrap().iter().map(|c| (c.k, c.l)).collect();
        let expected103: BTreeSet<(i64, i64)> =
            [(0, 0), (-10, 1), (10, -1), (-11, 1), (11, -1)].into_iter().collect();
        assert_eq!(xs103, expected103);
    }

    #[test]
    fn lattice_box_within_printed_bounds() {
        // the safety-margined derived box stays inside the documented bounds
        let (k43, l43) = lattice_box(&ctx(4, 3));
        assert!(k43 <= 11 && l43 <= 3, "got ({k43},{l43})");
        let (k103, l103) = lattice_box(&ctx(10, 3));
        assert!(k103 <= 14 && l103 <= 2, "got ({k103},{l103})");
    }

    #[test]
    fn boundary_graph_counts() {
        let g43 = boundary_graph(&ctx(4, 3)).unwrap();
        assert_eq!(g43.nodes.len(), 18);
        let g103 = boundary_graph(&ctx(10, 3)).unwrap();
        assert_eq!(g103.nodes.len(), 8);
        // every surviving node keeps an outgoing edge
        for i in 0..g103.nodes.len() {
            assert!(g103.outgoing(i).next().is_some());
        }
    }

    #[test]
    fn involution_closure() {
        for (a, b) in [(10, 3), (4, 3)] {
            let g = boundary_graph(&ctx(a, b)).unwrap();
            for node in &g.nodes {
                assert!(
                    g.node_index(&node.mirrored()).is_some(),
                    "missing mirror of {node:?} for ({a},{b})"
                );
            }
            // edge involution: [a,x,b] -(p,q)-> [a1,x1,b1] iff mirrored with swapped labels
            let set: BTreeSet<(usize, i64, i64, usize)> =
                g.edges.iter().map(|e| (e.from, e.p, e.q, e.to)).collect();
            for e in &g.edges {
                let mf = g.node_index(&g.nodes[e.from].mirrored()).unwrap();
                let mt = g.node_index(&g.nodes[e.to].mirrored()).unwrap();
                assert!(set.contains(&(mf, e.q, e.p, mt)));
            }
        }
    }

    #[test]
    fn edge_condition_exact() {
        // E1 as an exact identity: beta*x1 - x - q + p = 0
        let p = ctx(10, 3);
        let g = boundary_graph(&p).unwrap();
        for e in &g.edges {
            let x = g.nodes[e.from].x(&p);
            let x1 = g.nodes[e.to].x(&p);
            let lhs = x1.times_beta() - &x - p.from_int(e.q) + p.from_int(e.p);
            assert!(lhs.is_zero());
        }
    }

    #[test]
    fn start_nodes_10_3() {
        let p = ctx(10, 3);
        let g = boundary_graph(&p).unwrap();
        let starts = g.start_nodes(&p);
        let set: BTreeSet<BoundaryNode> = starts.iter().map(|&i| g.nodes[i]).collect();
        let expected: BTreeSet<BoundaryNode> = [
            BoundaryNode { a: 1, k: 0, l: 0, b: 2 },
            BoundaryNode { a: 1, k: -10, l: 1, b: 1 },
            BoundaryNode { a: 1, k: 11, l: -1, b: 1 },
            BoundaryNode { a: 2, k: 11, l: -1, b: 1 },
        ]
        .into_iter()
        .collect();
        assert_eq!(set, expected);
        // Six nodes lie on paths from the four start nodes. A count of 5
        // would require merging the pair [1,B-11,1], [1,B-11,2], but both
        // targets are forced by the edge conditions (via (8,0) and (8,1)
        // out of [1,11-B,1]) and both are needed to realize the even-depth
        // digit set {0,1,2}.
        assert_eq!(g.reachable(&starts).len(), 6);
    }

    #[test]
    fn start_nodes_4_3() {
        let p = ctx(4, 3);
        let g = boundary_graph(&p).unwrap();
        let starts = g.start_nodes(&p);
        let set: BTreeSet<BoundaryNode> = starts.iter().map(|&i| g.nodes[i]).collect();
        let expected: BTreeSet<BoundaryNode> = [
            BoundaryNode { a: 1, k: 0, l: 0, b: 2 },
            BoundaryNode { a: 1, k: -9, l: 2, b: 1 },
            BoundaryNode { a: 1, k: -9, l: 2, b: 2 },
            BoundaryNode { a: 1, k: -4, l: 1, b: 1 },
            BoundaryNode { a: 2, k: -4, l: 1, b: 1 },
            BoundaryNode { a: 1, k: 5, l: -1, b: 1 },
            BoundaryNode { a: 1, k: 5, l: -1, b: 2 },
            BoundaryNode { a: 2, k: 5, l: -1, b: 1 },
            BoundaryNode { a: 2, k: 10, l: -2, b: 1 },
        ]
        .into_iter()
        .collect();
        assert_eq!(set, expected);
        assert_eq!(g.reachable(&starts).len(), 15);
    }

    #[test]
    fn dot_and_json_roundtrip() {
        let p = ctx(10, 3);
        let g = boundary_graph(&p).unwrap();
        let dot1 = g.to_dot();
        let dot2 = g.to_dot();
        assert_eq!(dot1, dot2);
        assert_eq!(dot1.matches("->").count(), g.edges.len());
        let parsed = BoundaryGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(parsed, g);

        let adm = AdmGraph::new(&p);
        let parsed_adm = AdmGraph::from_json(&adm.to_json()).unwrap();
        assert_eq!(parsed_adm, adm);

        // empty graph document
        let empty = BoundaryGraph::from_parts(Vec::new(), Vec::new());
        assert!(empty.to_dot().starts_with("digraph"));
        assert_eq!(BoundaryGraph::from_json(&empty.to_json()).unwrap(), empty);
    }

    #[test]
    fn hypotheses_failure() {
        // (2,2): prime 2 ramifies in Q(sqrt(3))
        let p = ctx(2, 2);
        assert!(matches!(candidate_nodes(&p), Err(Error::HypothesesFail { prime: 2 })));
    }
}
