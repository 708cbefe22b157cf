//! Exact hulls and constrained infima of graph-directed IFS value sets, and
//! the pure-periodicity threshold gamma(beta).
//!
//! The value set of a node v is { sum_i p_{i+1} beta_2^i } over infinite
//! labelled paths from v. Its exact [min, max] hull solves a coupled min/max
//! Bellman system; substituting y(v, Lo) = lo(v), y(v, Hi) = -hi(v) turns it
//! into a plain discounted min-MDP with discount |beta_2| on a doubled state
//! space, which policy iteration solves exactly: the stabilized policy is an
//! eventually periodic path whose value is a geometric series in Q(beta),
//! and the exact Bellman identity on every state certifies optimality.
//!
//! A value set is certified to be a full interval when the child intervals
//! of every reachable node cover the node's hull without a gap; in that case
//! the hull tuple is itself the (unique) attractor. Constrained infima use
//! branch and bound on path prefixes: every prefix box is the exact attained
//! range of the suffix set, so the smallest feasible box endpoint is the
//! infimum.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use num_bigint::BigInt;

use crate::error::Error;
use crate::graphs::{boundary_graph, AdmGraph, BoundaryNode, DigitGraph};
use crate::numeration::{density_report, is_purely_periodic_rational};
use crate::qfield::{PisotQuad, QuadElem, Rational};

/// Exact attractor hull of one node, with the stabilized policies.
#[derive(Clone, Debug)]
pub struct Hull {
    pub lo: QuadElem,
    pub hi: QuadElem,
    /// Chosen edge (digit, target) realizing the minimum at each node.
    pub lo_policy: Vec<(i64, usize)>,
    pub hi_policy: Vec<(i64, usize)>,
    /// Always true on return: the exact Bellman fixed-point identity was
    /// verified on every node together with one-step deviation optimality.
    pub exact: bool,
}

/// Hulls for every node of a graph.
#[derive(Clone, Debug)]
pub struct NodeHulls {
    pub lo: Vec<QuadElem>,
    pub hi: Vec<QuadElem>,
    policy: Vec<usize>,
    doubled: DoubledMdp,
}

#[derive(Clone, Debug)]
struct DoubledMdp {
    /// per doubled state: (reward digit, next doubled state, original digit)
    edges: Vec<Vec<(i64, usize, i64)>>,
    discount: QuadElem,
}

const LO: usize = 0;
const HI: usize = 1;

fn doubled_index(node: usize, side: usize) -> usize {
    node * 2 + side
}

impl DoubledMdp {
    /// Builds the min-MDP carrying lo(v) at (v, Lo) and -hi(v) at (v, Hi).
    /// For beta_2 < 0 the two sides feed each other.
    fn new(g: &DigitGraph, ctx: &PisotQuad) -> Result<DoubledMdp, Error> {
        let flip = ctx.conj_negative();
        let mut edges = Vec::with_capacity(g.node_count() * 2);
        for v in 0..g.node_count() {
            if g.edges[v].is_empty() {
                return Err(Error::DeadEndNode { node: v });
            }
            for side in [LO, HI] {
                let mut es = Vec::with_capacity(g.edges[v].len());
                for &(d, w) in &g.edges[v] {
                    let reward = if side == LO { d } else { -d };
                    let next_side = if flip { 1 - side } else { side };
                    es.push((reward, doubled_index(w, next_side), d));
                }
                es.sort_unstable();
                edges.push(es);
            }
        }
        Ok(DoubledMdp { edges, discount: ctx.conj_abs() })
    }

    /// Exact evaluation of a deterministic policy: each state's path enters
    /// a cycle; the cycle value is a geometric series with ratio
    /// discount^len, the tail back-substitutes.
    fn evaluate(&self, policy: &[usize], ctx: &PisotQuad) -> Vec<Option<QuadElem>> {
        let n = self.edges.len();
        let mut value: Vec<Option<QuadElem>> = vec![None; n];
        for s0 in 0..n {
            if value[s0].is_some() {
                continue;
            }
            let mut path = Vec::new();
            let mut pos: HashMap<usize, usize> = HashMap::new();
            let mut s = s0;
            while value[s].is_none() && !pos.contains_key(&s) {
                pos.insert(s, path.len());
                path.push(s);
                s = self.edges[s][policy[s]].1;
            }
            if value[s].is_none() {
                // closed a new cycle at position pos[s]: its head value is a
                // geometric series with ratio discount^len
                let start = pos[&s];
                let cycle = &path[start..];
                let len = cycle.len() as u32;
                let mut series = ctx.zero();
                let mut pow = ctx.one();
                for &cs in cycle {
                    let r = self.edges[cs][policy[cs]].0;
                    series = series + pow.scale(&Rational::from_integer(BigInt::from(r)));
                    pow = &pow * &self.discount;
                }
                let denom = ctx.one() - self.discount.pow(len);
                value[path[start]] = Some(&series / &denom);
            }
            // back-substitute along the walk: each state is r + discount*next
            for i in (0..path.len()).rev() {
                if value[path[i]].is_some() {
                    continue;
                }
                let (r, next, _) = self.edges[path[i]][policy[path[i]]];
                let nv = value[next].clone().expect("successor resolved");
                value[path[i]] = Some(ctx.from_int(r) + (&self.discount * &nv));
            }
        }
        value
    }

    /// Policy iteration to the exact fixed point.
    fn solve(&self, ctx: &PisotQuad) -> (Vec<QuadElem>, Vec<usize>) {
        let n = self.edges.len();
        let mut policy: Vec<usize> = vec![0; n];
        loop {
            let value: Vec<QuadElem> = self
                .evaluate(&policy, ctx)
                .into_iter()
                .map(|v| v.expect("every state resolves"))
                .collect();
            let mut changed = false;
            for s in 0..n {
                let mut best = policy[s];
                let mut best_q = ctx.from_int(self.edges[s][best].0)
                    + (&self.discount * &value[self.edges[s][best].1]);
                for (e, &(r, next, _)) in self.edges[s].iter().enumerate() {
                    let q = ctx.from_int(r) + (&self.discount * &value[next]);
                    let better = match q.cmp_same_ctx(&best_q) {
                        Ordering::Less => true,
                        Ordering::Equal => e < best,
                        Ordering::Greater => false,
                    };
                    if better {
                        best = e;
                        best_q = q;
                    }
                }
                if best != policy[s] {
                    policy[s] = best;
                    changed = true;
                }
            }
            if !changed {
                let value: Vec<QuadElem> = self
                    .evaluate(&policy, ctx)
                    .into_iter()
                    .map(|v| v.expect("every state resolves"))
                    .collect();
                // Bellman certificate: exact fixed point and one-step optimality
                for s in 0..n {
                    let mut best: Option<QuadElem> = None;
                    for &(r, next, _) in &self.edges[s] {
                        let q = ctx.from_int(r) + (&self.discount * &value[next]);
                        best = Some(match best {
                            None => q,
                            Some(b) => {
                                if q.cmp_same_ctx(&b) == Ordering::Less {
                                    q
                                } else {
                                    b
                                }
                            }
                        });
                    }
                    assert_eq!(
                        value[s].cmp_same_ctx(&best.unwrap()),
                        Ordering::Equal,
                        "Bellman certificate failed at doubled state {s}"
                    );
                }
                return (value, policy);
            }
        }
    }
}

/// Exact hulls of every node of the graph.
pub fn attractor_hulls(g: &DigitGraph, ctx: &PisotQuad) -> Result<NodeHulls, Error> {
    let mdp = DoubledMdp::new(g, ctx)?;
    let (value, policy) = mdp.solve(ctx);
    let n = g.node_count();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for v in 0..n {
        lo.push(value[doubled_index(v, LO)].clone());
        hi.push(-value[doubled_index(v, HI)].clone());
    }
    Ok(NodeHulls { lo, hi, policy, doubled: mdp })
}

impl NodeHulls {
    pub fn node_count(&self) -> usize {
        self.lo.len()
    }

    fn policy_edge(&self, node: usize, side: usize) -> (i64, usize, i64) {
        let s = doubled_index(node, side);
        self.doubled.edges[s][self.policy[s]]
    }

    /// The (digit, target) choices realizing the side at each node.
    fn side_policy(&self, side: usize) -> Vec<(i64, usize)> {
        (0..self.node_count())
            .map(|v| {
                let (_, next, orig) = self.policy_edge(v, side);
                (orig, next / 2)
            })
            .collect()
    }

    /// Digits of the eventually periodic optimal path from (node, side):
    /// (tail digits, cycle digits) in original labels.
    fn witness_path(&self, node: usize, side: usize) -> (Vec<i64>, Vec<i64>) {
        let mut s = doubled_index(node, side);
        let mut digits = Vec::new();
        let mut pos: HashMap<usize, usize> = HashMap::new();
        loop {
            if let Some(&j) = pos.get(&s) {
                let cycle = digits.split_off(j);
                return (digits, cycle);
            }
            pos.insert(s, digits.len());
            let (_, next, orig) = self.doubled.edges[s][self.policy[s]];
            digits.push(orig);
            s = next;
        }
    }
}

/// Exact attractor hull from one node, with Bellman-certified policies.
pub fn attractor_hull(g: &DigitGraph, start: usize, ctx: &PisotQuad) -> Result<Hull, Error> {
    let hulls = attractor_hulls(g, ctx)?;
    Ok(Hull {
        lo: hulls.lo[start].clone(),
        hi: hulls.hi[start].clone(),
        lo_policy: hulls.side_policy(LO),
        hi_policy: hulls.side_policy(HI),
        exact: true,
    })
}

/// Value of the eventually periodic digit path tail.cycle^inf, as the exact
/// geometric series sum_i d_i beta_2^i.
pub fn path_value(tail: &[i64], cycle: &[i64], ctx: &PisotQuad) -> QuadElem {
    let beta2 = ctx.beta().conj();
    let mut cycle_val = ctx.zero();
    let mut pow = ctx.one();
    for &d in cycle {
        cycle_val = cycle_val + pow.scale(&Rational::from_integer(BigInt::from(d)));
        pow = &pow * &beta2;
    }
    let mut value = if cycle.is_empty() {
        ctx.zero()
    } else {
        let denom = ctx.one() - beta2.pow(cycle.len() as u32);
        &cycle_val / &denom
    };
    for &d in tail.iter().rev() {
        value = ctx.from_int(d) + (&beta2 * &value);
    }
    value
}

/// Per-depth digit sets when the reachable labelling is depth-periodic:
/// tries periods 1..=4 and returns the smallest that is uniform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DigitPattern {
    Uniform { period: usize, sets: Vec<Vec<i64>> },
    NotUniform,
}

pub fn digit_pattern(g: &DigitGraph, start: usize) -> DigitPattern {
    'periods: for k in 1..=4usize {
        // candidate class sets: union of outgoing digits over the nodes
        // reachable at each depth class
        let mut seen = vec![false; g.node_count() * k];
        let mut queue = VecDeque::new();
        seen[start * k] = true;
        queue.push_back((start, 0usize));
        let mut sets: Vec<Vec<i64>> = vec![Vec::new(); k];
        while let Some((v, r)) = queue.pop_front() {
            sets[r].extend(g.edges[v].iter().map(|&(d, _)| d));
            for &(_, w) in &g.edges[v] {
                let nr = (r + 1) % k;
                if !seen[w * k + nr] {
                    seen[w * k + nr] = true;
                    queue.push_back((w, nr));
                }
            }
        }
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue 'periods;
            }
        }
        // the pattern is real only if every digit choice d_0 d_1 ... with
        // d_i in sets[i mod k] labels a path; track the subset of nodes
        // compatible with the digits consumed so far
        let start_set = 1u64 << start;
        if g.node_count() > 60 {
            return DigitPattern::NotUniform;
        }
        let mut frontier: Vec<(u64, usize)> = vec![(start_set, 0)];
        let mut visited: Vec<(u64, usize)> = vec![(start_set, 0)];
        let mut free = true;
        'verify: while let Some((subset, r)) = frontier.pop() {
            for &d in &sets[r] {
                let mut next = 0u64;
                for v in 0..g.node_count() {
                    if subset & (1 << v) != 0 {
                        for &(dd, w) in &g.edges[v] {
                            if dd == d {
                                next |= 1 << w;
                            }
                        }
                    }
                }
                if next == 0 {
                    free = false;
                    break 'verify;
                }
                let state = (next, (r + 1) % k);
                if !visited.contains(&state) {
                    if visited.len() > 4096 {
                        free = false;
                        break 'verify;
                    }
                    visited.push(state);
                    frontier.push(state);
                }
            }
        }
        if free {
            return DigitPattern::Uniform { period: k, sets };
        }
    }
    DigitPattern::NotUniform
}

/// Cookie Cantor set X(alpha, n) = { sum a_i alpha^i, a_i in 0..n-1 }:
/// hull [0, (n-1)/(1-alpha)], a full interval exactly when alpha >= 1/n.
pub fn cookie_cantor(alpha: &QuadElem, n: i64) -> Result<(QuadElem, bool), Error> {
    if n < 1 {
        return Err(Error::OutOfRange { what: "cookie_cantor needs n >= 1" });
    }
    let ctx = alpha.coeffs();
    let one = QuadElem::one(ctx);
    if alpha.sign() <= 0 || alpha.cmp_same_ctx(&one) != Ordering::Less {
        return Err(Error::OutOfRange { what: "cookie_cantor needs 0 < alpha < 1" });
    }
    let hi = &QuadElem::from_int(n - 1, ctx) / &(&one - alpha);
    let n_alpha = alpha.scale(&Rational::from_integer(BigInt::from(n)));
    let full = n_alpha.cmp_same_ctx(&one) != Ordering::Less;
    Ok((hi, full))
}

/// Certifies that every reachable value set is exactly its hull interval:
/// the child intervals d + beta_2 * hull(w) of each reachable node must
/// cover the node's hull without a gap. The hull tuple is then invariant
/// under the IFS, hence equal to the attractor.
pub fn interval_certified(
    g: &DigitGraph,
    hulls: &NodeHulls,
    start: usize,
    ctx: &PisotQuad,
) -> bool {
    let beta2 = ctx.beta().conj();
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        let mut children: Vec<(QuadElem, QuadElem)> = Vec::with_capacity(g.edges[v].len());
        for &(d, w) in &g.edges[v] {
            let dd = ctx.from_int(d);
            let (clo, chi) = if ctx.conj_negative() {
                (&dd + &(&beta2 * &hulls.hi[w]), &dd + &(&beta2 * &hulls.lo[w]))
            } else {
                (&dd + &(&beta2 * &hulls.lo[w]), &dd + &(&beta2 * &hulls.hi[w]))
            };
            children.push((clo, chi));
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
        children.sort_by(|x, y| x.0.cmp_same_ctx(&y.0));
        let mut reach = hulls.lo[v].clone();
        for (clo, chi) in children {
            if clo.cmp_same_ctx(&reach) == Ordering::Greater {
                return false;
            }
            if chi.cmp_same_ctx(&reach) == Ordering::Greater {
                reach = chi;
            }
        }
        if reach.cmp_same_ctx(&hulls.hi[v]) == Ordering::Less {
            return false;
        }
    }
    true
}

/// A target interval with open/closed endpoint flags.
#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: QuadElem,
    pub hi: QuadElem,
    pub lo_open: bool,
    pub hi_open: bool,
}

/// Witness for an exact infimum.
#[derive(Clone, Debug)]
pub enum InfWitness {
    /// An eventually periodic path attaining the value, in original digits.
    Path { prefix: Vec<i64>, tail: Vec<i64>, cycle: Vec<i64> },
    /// The infimum is the interval endpoint, accumulated inside a certified
    /// full-interval value set.
    FullInterval,
}

#[derive(Clone, Debug)]
pub enum InfOutcome {
    /// The value set misses the interval entirely.
    Empty,
    /// Exact infimum of (-V) within the interval.
    Exact { value: QuadElem, witness: InfWitness },
    /// Certified enclosure at the requested tolerance; emptiness of the
    /// intersection was not decided.
    Enclosure { lo: Rational, hi: Rational },
}

struct Box_ {
    lo: QuadElem,
    hi: QuadElem,
    prefix_sum: QuadElem,
    scale: QuadElem,
    node: usize,
    prefix: Vec<i64>,
}

struct HeapEntry {
    key: QuadElem,
    seq: u64,
    item: Box_,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key.cmp_same_ctx(&other.key) == Ordering::Equal && self.seq == other.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap: reverse so the smallest key pops first
        other
            .key
            .cmp_same_ctx(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

const MAX_POPS: usize = 500_000;

/// Computes inf { w in -V : w in I } where V is the attractor value set of
/// `g` from `start`. Branch and bound on path prefixes; exact when the
/// optimum is an attained box endpoint or the interval endpoint inside a
/// certified full-interval box; otherwise a tol-wide enclosure.
pub fn inf_in_interval(
    g: &DigitGraph,
    start: usize,
    interval: &Interval,
    tol: &Rational,
    ctx: &PisotQuad,
) -> Result<InfOutcome, Error> {
    if interval.lo.cmp_same_ctx(&interval.hi) == Ordering::Greater {
        return Err(Error::BadInterval);
    }
    let neg = g.negated();
    let hulls = attractor_hulls(&neg, ctx)?;
    let full: Vec<bool> = (0..neg.node_count())
        .map(|v| interval_certified(&neg, &hulls, v, ctx))
        .collect();
    let beta2 = ctx.beta().conj();
    let tol_elem = ctx.from_rational(tol);

    let in_interval = |x: &QuadElem| -> bool {
        let lo_ok = match x.cmp_same_ctx(&interval.lo) {
            Ordering::Greater => true,
            Ordering::Equal => !interval.lo_open,
            Ordering::Less => false,
        };
        let hi_ok = match x.cmp_same_ctx(&interval.hi) {
            Ordering::Less => true,
            Ordering::Equal => !interval.hi_open,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    };
    // box entirely below or above the interval
    let disjoint = |b: &Box_| -> bool {
        match b.hi.cmp_same_ctx(&interval.lo) {
            Ordering::Less => return true,
            Ordering::Equal if interval.lo_open => return true,
            _ => {}
        }
        match b.lo.cmp_same_ctx(&interval.hi) {
            Ordering::Greater => return true,
            Ordering::Equal if interval.hi_open => return true,
            _ => {}
        }
        false
    };

    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut seq = 0u64;
    let push = |heap: &mut BinaryHeap<HeapEntry>, b: Box_, seq: &mut u64| {
        *seq += 1;
        heap.push(HeapEntry { key: b.lo.clone(), seq: *seq, item: b });
    };
    push(
        &mut heap,
        Box_ {
            lo: hulls.lo[start].clone(),
            hi: hulls.hi[start].clone(),
            prefix_sum: ctx.zero(),
            scale: ctx.one(),
            node: start,
            prefix: Vec::new(),
        },
        &mut seq,
    );

    let mut residual_min_lower: Option<QuadElem> = None;
    let mut residuals: Vec<Box_> = Vec::new();
    let mut feasible_upper: Option<QuadElem> = None;
    let mut pops = 0usize;

    while let Some(entry) = heap.pop() {
        let b = entry.item;
        pops += 1;
        if disjoint(&b) {
            continue;
        }
        if in_interval(&b.lo) {
            // smallest pending lower endpoint, attained: this is the infimum
            // unless an earlier residual might hide something smaller
            let safe = match &residual_min_lower {
                None => true,
                Some(r) => b.lo.cmp_same_ctx(r) != Ordering::Greater,
            };
            if safe {
                // the box lower endpoint is prefix + scale * (lo or hi of the
                // negated-graph hull, by the sign of scale); its attaining
                // tail is the corresponding policy path
                let side = if b.scale.sign() > 0 { LO } else { HI };
                let (tail_n, cycle_n) = hulls.witness_path(b.node, side);
                // report the path in original digits
                let prefix: Vec<i64> = b.prefix.iter().map(|d| -d).collect();
                let tail: Vec<i64> = tail_n.iter().map(|d| -d).collect();
                let cycle: Vec<i64> = cycle_n.iter().map(|d| -d).collect();
                // certificate: substituting the eventually periodic witness
                // into the geometric series must negate to the infimum
                let mut head = prefix.clone();
                head.extend(tail.iter().copied());
                let val = path_value(&head, &cycle, ctx);
                assert_eq!(
                    (-&val).cmp_same_ctx(&b.lo),
                    Ordering::Equal,
                    "witness certificate failed"
                );
                return Ok(InfOutcome::Exact {
                    value: b.lo,
                    witness: InfWitness::Path { prefix, tail, cycle },
                });
            }
        } else if full[b.node] && b.lo.cmp_same_ctx(&interval.lo) == Ordering::Less {
            // full interval straddling the lower endpoint: the infimum is
            // the endpoint itself (all global feasible values are >= it)
            return Ok(InfOutcome::Exact {
                value: interval.lo.clone(),
                witness: InfWitness::FullInterval,
            });
        }
        if in_interval(&b.hi) {
            feasible_upper = Some(match feasible_upper {
                None => b.hi.clone(),
                Some(f) => {
                    if b.hi.cmp_same_ctx(&f) == Ordering::Less {
                        b.hi.clone()
                    } else {
                        f
                    }
                }
            });
        }
        let width = &b.hi - &b.lo;
        if width.cmp_same_ctx(&tol_elem) != Ordering::Greater || pops > MAX_POPS {
            let lower = max_elem(&b.lo, &interval.lo);
            residual_min_lower = Some(match residual_min_lower {
                None => lower.clone(),
                Some(r) => {
                    if lower.cmp_same_ctx(&r) == Ordering::Less {
                        lower.clone()
                    } else {
                        r
                    }
                }
            });
            residuals.push(b);
            continue;
        }
        // expand children in the negated graph
        for &(dneg, w) in &neg.edges[b.node] {
            let prefix_sum = &b.prefix_sum + &b.scale.scale(&Rational::from_integer(dneg.into()));
            let scale = &b.scale * &beta2;
            let (clo, chi) = if scale.sign() > 0 {
                (&prefix_sum + &(&scale * &hulls.lo[w]), &prefix_sum + &(&scale * &hulls.hi[w]))
            } else {
                (&prefix_sum + &(&scale * &hulls.hi[w]), &prefix_sum + &(&scale * &hulls.lo[w]))
            };
            let mut prefix = b.prefix.clone();
            prefix.push(dneg);
            push(
                &mut heap,
                Box_ { lo: clo, hi: chi, prefix_sum, scale: scale.clone(), node: w, prefix },
                &mut seq,
            );
        }
    }

    if residuals.is_empty() {
        return Ok(InfOutcome::Empty);
    }
    let lower = residual_min_lower.expect("residuals recorded a lower bound");
    let upper = match feasible_upper {
        Some(f) => f,
        None => {
            // no attained feasible value found; fall back to the tightest
            // in-interval endpoint information available
            let mut u = interval.hi.clone();
            for b in &residuals {
                let cand = min_elem(&b.hi, &interval.hi);
                if cand.cmp_same_ctx(&u) == Ordering::Less {
                    u = cand;
                }
            }
            u
        }
    };
    let (lo_rat, _) = lower.approx(96);
    let (_, hi_rat) = upper.approx(96);
    Ok(InfOutcome::Enclosure { lo: lo_rat, hi: hi_rat })
}

fn max_elem(a: &QuadElem, b: &QuadElem) -> QuadElem {
    if a.cmp_same_ctx(b) == Ordering::Less {
        b.clone()
    } else {
        a.clone()
    }
}

fn min_elem(a: &QuadElem, b: &QuadElem) -> QuadElem {
    if a.cmp_same_ctx(b) == Ordering::Greater {
        b.clone()
    } else {
        a.clone()
    }
}

/// Exact minimum of the subtile attractor pi(T^(a)): the value set of the
/// reversed admissibility graph from node a.
pub fn subtile_min(a: usize, ctx: &PisotQuad) -> Result<(QuadElem, bool), Error> {
    let adm = AdmGraph::new(ctx);
    let rev = adm.reversed_digit_graph();
    let hulls = attractor_hulls(&rev, ctx)?;
    Ok((hulls.lo[a - 1].clone(), true))
}

/// Scan-oracle result over reduced rationals p/q in (0, upper] with
/// q <= qmax and gcd(q, N(beta)) = 1.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub qmax: u32,
    pub upper: Rational,
    pub tested: usize,
    /// Smallest tested rational that is not purely periodic.
    pub first_failure: Option<Rational>,
    /// Threshold below which every tested rational was purely periodic.
    pub lower_bracket: Rational,
}

pub fn gamma_scan(ctx: &PisotQuad, qmax: u32, upper: &Rational) -> Result<ScanResult, Error> {
    let (tested, first_failure) = gamma_scan_range(ctx, 1, qmax, upper)?;
    let lower_bracket = first_failure.clone().unwrap_or_else(|| upper.clone());
    Ok(ScanResult { qmax, upper: upper.clone(), tested, first_failure, lower_bracket })
}

/// Scan restricted to denominators qmin..=qmax; building block for the
/// parallel CLI driver.
pub fn gamma_scan_range(
    ctx: &PisotQuad,
    qmin: u32,
    qmax: u32,
    upper: &Rational,
) -> Result<(usize, Option<Rational>), Error> {
    let norm = BigInt::from(ctx.norm_beta().unsigned_abs());
    let mut tested = 0usize;
    let mut first_failure: Option<Rational> = None;
    for q in qmin..=qmax.max(qmin) {
        let qb = BigInt::from(q);
        if num_integer::Integer::gcd(&qb, &norm) > BigInt::from(1u8) {
            continue;
        }
        // p < q: pure periodicity lives on [0, 1)
        for p in 1..q as u64 {
            if num_integer::Integer::gcd(&BigInt::from(p), &qb) > BigInt::from(1u8) {
                continue;
            }
            let x = Rational::new(BigInt::from(p), qb.clone());
            if &x > upper {
                break;
            }
            if let Some(f) = &first_failure {
                if &x >= f {
                    continue;
                }
            }
            tested += 1;
            let (pp, _) = is_purely_periodic_rational(&x, ctx)?;
            if !pp {
                first_failure = Some(x);
            }
        }
    }
    Ok((tested, first_failure))
}

/// Which of the classification situations produced gamma.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Situation {
    /// Orbit-point membership T^(a-1)(1) in -pi(T^(a)).
    A,
    /// Intersection of two subtiles (x = 0 boundary node).
    B,
    /// An x-tile intersection with x != 0.
    C,
    /// No obstruction: gamma = 1.
    Full,
    /// All channels empty with a positive conjugate: gamma = 0.
    Zero,
}

#[derive(Clone, Debug)]
pub enum GammaWitness {
    Boundary(BoundaryNode),
    Subtile(usize),
}

#[derive(Clone, Debug)]
pub enum GammaValue {
    Exact(QuadElem),
    Enclosure { lo: Rational, hi: Rational },
}

#[derive(Clone, Debug)]
pub struct GammaResult {
    pub value: GammaValue,
    pub situation: Situation,
    pub witness: Option<GammaWitness>,
    pub scan: Option<ScanResult>,
    /// True when the density conditions (or unitness) certify exactness.
    pub density_ok: bool,
}

/// Default tolerance for enclosures: 2^-40.
pub fn default_tol() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(1u64 << 40))
}

/// Computes gamma(beta) as the minimum over the non-empty obstruction
/// channels: orbit-point membership (A), subtile intersections at x = 0 (B),
/// and x-tile intersections with x > 0 (C); gamma = 1 when every channel is
/// empty and beta_2 < 0, and 0 when every channel is empty and beta_2 > 0.
pub fn gamma(
    ctx: &PisotQuad,
    tol: &Rational,
    scan: Option<(u32, Rational)>,
) -> Result<GammaResult, Error> {
    let report = density_report(ctx);
    let density_ok = report.overall || ctx.is_unit();
    let bg = boundary_graph(ctx)?;
    let first = bg.first_digit_graph();
    let adm = AdmGraph::new(ctx);
    let rev = adm.reversed_digit_graph();
    let n = ctx.n();
    let one = ctx.one();

    struct Candidate {
        value: GammaValue,
        situation: Situation,
        witness: GammaWitness,
    }
    let mut candidates: Vec<Candidate> = Vec::new();

    // A: membership of T^(a-1)(1) in the negated subtile attractor
    for a in 1..=n {
        let t = ctx.orbit_value(a).clone();
        let interval = Interval { lo: t.clone(), hi: t, lo_open: false, hi_open: false };
        match inf_in_interval(&rev, a - 1, &interval, tol, ctx)? {
            InfOutcome::Empty => {}
            InfOutcome::Exact { value, .. } => candidates.push(Candidate {
                value: GammaValue::Exact(value),
                situation: Situation::A,
                witness: GammaWitness::Subtile(a),
            }),
            InfOutcome::Enclosure { lo, hi } => candidates.push(Candidate {
                value: GammaValue::Enclosure { lo, hi },
                situation: Situation::A,
                witness: GammaWitness::Subtile(a),
            }),
        }
    }

    // B: x = 0 nodes [a, 0, b], queried on [T^(b-1)(1), T^(a-1)(1)]
    for (i, node) in bg.nodes.iter().enumerate() {
        if node.k != 0 || node.l != 0 {
            continue;
        }
        let ta = ctx.orbit_value(node.a);
        let tb = ctx.orbit_value(node.b);
        if tb.cmp_same_ctx(ta) == Ordering::Greater {
            continue; // the mirrored node covers this pair
        }
        let interval =
            Interval { lo: tb.clone(), hi: ta.clone(), lo_open: false, hi_open: false };
        match inf_in_interval(&first, i, &interval, tol, ctx)? {
            InfOutcome::Empty => {}
            InfOutcome::Exact { value, .. } => candidates.push(Candidate {
                value: GammaValue::Exact(value),
                situation: Situation::B,
                witness: GammaWitness::Boundary(*node),
            }),
            InfOutcome::Enclosure { lo, hi } => candidates.push(Candidate {
                value: GammaValue::Enclosure { lo, hi },
                situation: Situation::B,
                witness: GammaWitness::Boundary(*node),
            }),
        }
    }

    // C: start nodes with x > 0, queried on (0, T^(a-1)(1))
    for &i in &bg.start_nodes(ctx) {
        let node = bg.nodes[i];
        if node.k == 0 && node.l == 0 {
            continue;
        }
        let ta = ctx.orbit_value(node.a);
        let interval =
            Interval { lo: ctx.zero(), hi: ta.clone(), lo_open: true, hi_open: true };
        match inf_in_interval(&first, i, &interval, tol, ctx)? {
            InfOutcome::Empty => {}
            InfOutcome::Exact { value, .. } => candidates.push(Candidate {
                value: GammaValue::Exact(value),
                situation: Situation::C,
                witness: GammaWitness::Boundary(node),
            }),
            InfOutcome::Enclosure { lo, hi } => candidates.push(Candidate {
                value: GammaValue::Enclosure { lo, hi },
                situation: Situation::C,
                witness: GammaWitness::Boundary(node),
            }),
        }
    }

    // aggregate: exact minimum, with enclosures folded in conservatively
    let mut best_exact: Option<(QuadElem, Situation, GammaWitness)> = None;
    for c in &candidates {
        if let GammaValue::Exact(v) = &c.value {
            let replace = match &best_exact {
                None => true,
                Some((bv, _, _)) => v.cmp_same_ctx(bv) == Ordering::Less,
            };
            if replace {
                best_exact = Some((v.clone(), c.situation, c.witness.clone()));
            }
        }
    }
    let mut enclosure_floor: Option<Rational> = None;
    for c in &candidates {
        if let GammaValue::Enclosure { lo, .. } = &c.value {
            let blocking = match &best_exact {
                None => true,
                Some((bv, _, _)) => bv.cmp_rational(lo) == Ordering::Greater,
            };
            if blocking {
                enclosure_floor = Some(match &enclosure_floor {
                    None => lo.clone(),
                    Some(f) => {
                        if lo < f {
                            lo.clone()
                        } else {
                            f.clone()
                        }
                    }
                });
            }
        }
    }

    let scan_result = match &scan {
        Some((qmax, upper)) => Some(gamma_scan(ctx, *qmax, upper)?),
        None => None,
    };

    let mut result = match (best_exact, enclosure_floor) {
        (None, None) => {
            if ctx.conj_negative() {
                GammaResult {
                    value: GammaValue::Exact(one.clone()),
                    situation: Situation::Full,
                    witness: None,
                    scan: None,
                    density_ok,
                }
            } else {
                GammaResult {
                    value: GammaValue::Exact(ctx.zero()),
                    situation: Situation::Zero,
                    witness: None,
                    scan: None,
                    density_ok,
                }
            }
        }
        (Some((v, situation, witness)), None) => {
            let (v, situation) = if v.cmp_same_ctx(&one) == Ordering::Greater {
                (one.clone(), Situation::Full)
            } else {
                (v, situation)
            };
            GammaResult {
                value: GammaValue::Exact(v),
                situation,
                witness: Some(witness),
                scan: None,
                density_ok,
            }
        }
        (best, Some(floor)) => {
            // an undecided channel could lie below the best exact value
            let hi = match &best {
                Some((bv, _, _)) => bv.approx(96).1,
                None => Rational::from_integer(BigInt::from(1)),
            };
            let (situation, witness) = match best {
                Some((_, s, w)) => (s, Some(w)),
                None => (Situation::Full, None),
            };
            GammaResult {
                value: GammaValue::Enclosure { lo: floor, hi },
                situation,
                witness,
                scan: None,
                density_ok,
            }
        }
    };

    if !density_ok {
        // without the density conditions the channel sets over-approximate,
        // so the channel minimum is only a certified lower bound; the scan
        // first failure is a certified upper bound
        let lo = match &result.value {
            GammaValue::Exact(v) => v.approx(96).0,
            GammaValue::Enclosure { lo, .. } => lo.clone(),
        };
        let hi = match &scan_result {
            Some(s) => s
                .first_failure
                .clone()
                .unwrap_or_else(|| Rational::from_integer(BigInt::from(1))),
            None => Rational::from_integer(BigInt::from(1)),
        };
        result.value = GammaValue::Enclosure { lo, hi };
    }
    result.scan = scan_result;
    Ok(result)
}
