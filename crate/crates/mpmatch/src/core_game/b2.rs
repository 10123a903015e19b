//! Core membership for capacities at most 2.
//!
//! With `b <= 2` every b-matching splits into paths and cycles, so besides
//! `x(i) >= 0` and `x(N) = v(N)` only the constraints `x(V(C)) >= w(C)` for
//! cycles of `G[{b = 2}]` and `x(V(P)) >= w(P)` for paths with inner
//! vertices of capacity 2 matter. Both families are searched exactly as
//! minimum-cost perfect matchings of small gadget graphs.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::instance::{Coalition, Edge, Instance};
use crate::matching::blossom;
use crate::rational::{common_denominator, frac, Q};

use super::{allocation_verdict, check_allocation_len, nonnegative_or_violation, CoreVerdict, CoreViolation};

/// `mate` of a minimum-cost perfect matching; one must exist.
fn min_cost_perfect_matching(nv: usize, edges: &[(usize, usize, Q)]) -> Vec<usize> {
    if nv == 0 {
        return Vec::new();
    }
    let denom = common_denominator(edges.iter().map(|e| &e.2));
    let costs: Vec<BigInt> = edges.iter().map(|e| e.2.numer() * &denom / e.2.denom()).collect();
    // Offset so that every weight is positive and perfect matchings dominate.
    let offset: BigInt = costs.iter().map(|c| c.abs()).sum::<BigInt>() * 2 + 1;
    let weights: Vec<BigInt> = costs.iter().map(|c| &offset - c).collect();
    let bits = weights.iter().map(|w| w.bits()).max().unwrap_or(0) + 64 - (nv as u64).leading_zeros() as u64;
    let mate = if bits + 8 < 120 {
        let e: Vec<(usize, usize, i128)> = edges
            .iter()
            .zip(&weights)
            .map(|(e, w)| (e.0, e.1, w.to_i128().expect("fits")))
            .collect();
        blossom::max_weight_matching(nv, &e, true)
    } else {
        let e: Vec<(usize, usize, BigInt)> = edges.iter().zip(weights).map(|(e, w)| (e.0, e.1, w)).collect();
        blossom::max_weight_matching(nv, &e, true)
    };
    mate.into_iter().map(|m| m.expect("gadget has a perfect matching")).collect()
}

/// Gadget whose perfect matchings correspond to subgraphs of the
/// instance; `edge_node[k]` holds the two nodes of edge `k` when present.
struct Gadget {
    nv: usize,
    edges: Vec<(usize, usize, Q)>,
    edge_node: Vec<Option<(usize, usize)>>,
}

impl Gadget {
    /// Instance edges whose nodes are matched to ports rather than to each other.
    fn used(&self, mate: &[usize]) -> Vec<usize> {
        self.edge_node
            .iter()
            .enumerate()
            .filter_map(|(k, n)| n.filter(|&(a, b)| mate[a] != b).map(|_| k))
            .collect()
    }

    fn cost(&self, mate: &[usize]) -> Q {
        self.edges
            .iter()
            .filter(|(a, b, _)| mate[*a] == *b)
            .map(|(_, _, c)| c.clone())
            .sum()
    }
}

/// Disjoint cycles of `G[{b = 2}]`: each vertex either closes its two
/// ports or sends both to edges. Using edge `ij` costs `end(i, ij) + end(j, ij)`.
fn cycle_gadget(inst: &Instance, end_cost: impl Fn(usize, &Edge) -> Q) -> Gadget {
    let mut port = vec![usize::MAX; inst.n()];
    let mut nv = 0;
    let mut edges = Vec::new();
    for i in 0..inst.n() {
        if inst.capacity(i) == 2 {
            port[i] = nv;
            edges.push((nv, nv + 1, Q::zero()));
            nv += 2;
        }
    }
    let mut edge_node = vec![None; inst.m()];
    for (k, e) in inst.edges().iter().enumerate() {
        if port[e.u] == usize::MAX || port[e.v] == usize::MAX {
            continue;
        }
        let (a, b) = (nv, nv + 1);
        nv += 2;
        edge_node[k] = Some((a, b));
        edges.push((a, b, Q::zero()));
        for (node, end) in [(a, e.u), (b, e.v)] {
            let c = end_cost(end, e);
            edges.push((port[end], node, c.clone()));
            edges.push((port[end] + 1, node, c));
        }
    }
    Gadget { nv, edges, edge_node }
}

/// Every b-matching `H` of the players with `b >= 1`; cost `x(V(H)) - w(H)`.
fn path_gadget(inst: &Instance, x: &[Q]) -> Gadget {
    let half = frac(1, 2);
    let mut port = vec![usize::MAX; inst.n()];
    let mut nv = 0;
    let mut edges = Vec::new();
    for i in 0..inst.n() {
        match inst.capacity(i) {
            0 => {}
            1 => {
                port[i] = nv;
                nv += 1;
            }
            _ => {
                port[i] = nv;
                edges.push((nv, nv + 1, Q::zero()));
                nv += 2;
            }
        }
    }
    let ports = nv;
    let mut edge_node = vec![None; inst.m()];
    for (k, e) in inst.edges().iter().enumerate() {
        if port[e.u] == usize::MAX || port[e.v] == usize::MAX {
            continue;
        }
        let (a, b) = (nv, nv + 1);
        nv += 2;
        edge_node[k] = Some((a, b));
        edges.push((a, b, Q::zero()));
        for (node, end) in [(a, e.u), (b, e.v)] {
            if inst.capacity(end) == 1 {
                edges.push((port[end], node, &x[end] - &e.w * &half));
            } else {
                let c = (&x[end] - &e.w) * &half;
                edges.push((port[end], node, c.clone()));
                edges.push((port[end] + 1, node, c));
            }
        }
    }
    let sinks = nv;
    nv += ports;
    for i in 0..inst.n() {
        match inst.capacity(i) {
            0 => {}
            1 => {
                for s in sinks..nv {
                    edges.push((port[i], s, Q::zero()));
                }
            }
            _ => {
                for s in sinks..nv {
                    edges.push((port[i], s, &x[i] * &half));
                    edges.push((port[i] + 1, s, &x[i] * &half));
                }
            }
        }
    }
    for s in sinks..nv {
        for t in s + 1..nv {
            edges.push((s, t, Q::zero()));
        }
    }
    Gadget { nv, edges, edge_node }
}

/// Connected components of an edge subset, as (vertices, edges).
fn edge_components(inst: &Instance, used: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut comp_of = vec![usize::MAX; inst.n()];
    let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let in_use = |k: usize| used.binary_search(&k).is_ok();
    for &k0 in used {
        let s = inst.edge(k0).u;
        if comp_of[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp_of[s] = id;
        let (mut verts, mut es) = (vec![s], Vec::new());
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(u, k) in inst.adj(v) {
                if !in_use(k) {
                    continue;
                }
                if v < u {
                    es.push(k);
                }
                if comp_of[u] == usize::MAX {
                    comp_of[u] = id;
                    verts.push(u);
                    stack.push(u);
                }
            }
        }
        verts.sort_unstable();
        es.sort_unstable();
        out.push((verts, es));
    }
    out
}

/// The component minimizing `lambda x(V) - w(E)`, with that value.
fn worst_component(inst: &Instance, x: &[Q], lambda: &Q, used: &[usize]) -> Option<(Vec<usize>, Vec<usize>, Q)> {
    edge_components(inst, used)
        .into_iter()
        .map(|(v, e)| {
            let xv: Q = v.iter().map(|&i| &x[i]).sum();
            let we: Q = e.iter().map(|&k| &inst.edge(k).w).sum();
            let val = lambda * xv - we;
            (v, e, val)
        })
        .min_by(|a, b| a.2.cmp(&b.2))
}

/// `(lambda x(i) - w(ij)) / 2` at end `i`.
fn ratio_end<'a>(x: &'a [Q], lambda: &Q) -> impl Fn(usize, &Edge) -> Q + 'a {
    let lambda = lambda.clone();
    move |i, e| (&lambda * &x[i] - &e.w) * frac(1, 2)
}

fn violated_structure(inst: &Instance, x: &[Q], gadget: &Gadget) -> Option<CoreViolation> {
    let mate = min_cost_perfect_matching(gadget.nv, &gadget.edges);
    if !gadget.cost(&mate).is_negative() {
        return None;
    }
    let used = gadget.used(&mate);
    let (verts, _, val) = worst_component(inst, x, &Q::from_integer(1.into()), &used)?;
    debug_assert!(val.is_negative());
    Some(CoreViolation::certify(inst, x, Coalition::new(verts)).expect("negative component violates"))
}

/// Exact core membership when every capacity is at most 2.
///
/// Stages: singletons `x(i) >= 0`; `x(N) < v(N)`; a player with `b = 0` and
/// positive payoff under `x(N) = v(N)`; cycles of `G[{b = 2}]`; paths and
/// cycles together; finally `x(N) > v(N)`.
pub fn core_membership_b2(inst: &Instance, x: &[Q]) -> Result<CoreVerdict> {
    check_allocation_len(inst, x)?;
    if let Some(i) = (0..inst.n()).find(|&i| inst.capacity(i) > 2) {
        return Err(Error::CapacityTooLarge { player: inst.id(i).into(), found: inst.capacity(i), bound: 2 });
    }
    if let Some(v) = nonnegative_or_violation(inst, x) {
        return Ok(v);
    }
    let head = allocation_verdict(inst, x);
    if let CoreVerdict::Violation(_) = head {
        return Ok(head);
    }
    if head.is_in_core() {
        if let Some(i) = (0..inst.n()).find(|&i| inst.capacity(i) == 0 && x[i].is_positive()) {
            let rest = Coalition::new((0..inst.n()).filter(|&j| j != i).collect());
            let v = CoreViolation::certify(inst, x, rest).expect("x(N - i) < v(N - i)");
            return Ok(CoreVerdict::Violation(v));
        }
    }
    let one = Q::from_integer(1.into());
    if let Some(v) = violated_structure(inst, x, &cycle_gadget(inst, ratio_end(x, &one))) {
        return Ok(CoreVerdict::Violation(v));
    }
    if let Some(v) = violated_structure(inst, x, &path_gadget(inst, x)) {
        return Ok(CoreVerdict::Violation(v));
    }
    Ok(head)
}

/// A cycle of `G[{b = 2}]` maximizing `w(C) / x(V(C))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioCycle {
    pub vertices: Coalition,
    pub edges: Vec<usize>,
    pub weight: Q,
    pub cost: Q,
    /// `None` when `x(V(C)) = 0 < w(C)`.
    pub ratio: Option<Q>,
}

fn ratio_cycle(inst: &Instance, x: &[Q], verts: Vec<usize>, edges: Vec<usize>) -> RatioCycle {
    let weight: Q = edges.iter().map(|&k| &inst.edge(k).w).sum();
    let cost: Q = verts.iter().map(|&i| &x[i]).sum();
    let ratio = if cost.is_zero() { weight.is_zero().then(Q::zero) } else { Some(&weight / &cost) };
    RatioCycle { vertices: Coalition::new(verts), edges, weight, cost, ratio }
}

/// Maximum profit-to-cost ratio cycle by Dinkelbach iteration; a ratio
/// above 1 means a violated cycle constraint. `None` if `G[{b = 2}]` is a forest.
pub fn max_ratio_cycle(inst: &Instance, x: &[Q]) -> Result<Option<RatioCycle>> {
    check_allocation_len(inst, x)?;
    if let Some(i) = (0..inst.n()).find(|&i| inst.capacity(i) > 2) {
        return Err(Error::CapacityTooLarge { player: inst.id(i).into(), found: inst.capacity(i), bound: 2 });
    }
    if let Some(i) = x.iter().position(|q| q.is_negative()) {
        return Err(Error::Precondition(format!("negative payoff for {}", inst.id(i))));
    }
    // Any cycle at all: every used edge earns one unit.
    let zeros = vec![Q::zero(); inst.n()];
    let probe = {
        let g = cycle_gadget(inst, |_, _| frac(-1, 2));
        let mate = min_cost_perfect_matching(g.nv, &g.edges);
        g.used(&mate)
    };
    let Some((verts, edges, _)) = worst_component(inst, &zeros, &Q::zero(), &probe) else { return Ok(None) };
    let mut best = ratio_cycle(inst, x, verts, edges);
    loop {
        let Some(lambda) = best.ratio.clone() else { return Ok(Some(best)) };
        let g = cycle_gadget(inst, ratio_end(x, &lambda));
        let mate = min_cost_perfect_matching(g.nv, &g.edges);
        if !g.cost(&mate).is_negative() {
            return Ok(Some(best));
        }
        let used = g.used(&mate);
        let (verts, edges, _) = worst_component(inst, x, &lambda, &used).expect("negative cover has a cycle");
        let next = ratio_cycle(inst, x, verts, edges);
        debug_assert!(next.ratio.as_ref().is_none_or(|r| *r > lambda));
        best = next;
    }
}
