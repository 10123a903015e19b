//! The gadget reduction from capacitated instances to unit-capacity ones,
//! together with solution reduction, lifting and unit-capacity rematching.
//!
//! Per player `i` there are `b(i)` copies `i^s`. Per edge `ij` there are
//! four players `ī_j, i_j, j_i, j̄_i` on the path
//! `i^s - ī_j - i_j - j_i - j̄_i - j^t`, every edge carrying `w(ij)`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance};
use crate::matching::{is_b_matching, max_weight_b_matching, weight, BMatching};
use crate::rational::Q;
use crate::stability::{
    check_compatible, require_stable, utilities_unchecked, PayoffMatrix, Solution, StabilityVerdict,
};

/// What a player of the reduced instance stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// `i^s`, `s` counted from 1.
    Copy { player: usize, s: u32 },
    /// `ī_j` on edge `edge = ij`.
    Outer { i: usize, j: usize, edge: usize },
    /// `i_j` on edge `edge = ij`.
    Inner { i: usize, j: usize, edge: usize },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GadgetEdge {
    pub a: usize,
    pub b: usize,
    pub edge: usize,
}

/// Index arithmetic of the reduced graph, shared with the matching engine.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub n_vertices: usize,
    pub copy_start: Vec<usize>,
    pub gadget_start: Vec<usize>,
    pub first_edge: Vec<usize>,
    pub edges: Vec<GadgetEdge>,
    slots: Vec<Slot>,
}

impl Layout {
    pub fn slot(&self, v: usize) -> Slot {
        self.slots[v]
    }
}

pub(crate) fn gadget_layout(inst: &Instance) -> Layout {
    let mut slots = Vec::new();
    let mut copy_start = Vec::with_capacity(inst.n());
    for i in 0..inst.n() {
        copy_start.push(slots.len());
        for s in 1..=inst.capacity(i) {
            slots.push(Slot::Copy { player: i, s });
        }
    }
    let mut gadget_start = Vec::with_capacity(inst.m());
    let mut first_edge = Vec::with_capacity(inst.m());
    let mut edges = Vec::new();
    for (k, e) in inst.edges().iter().enumerate() {
        let g = slots.len();
        gadget_start.push(g);
        slots.push(Slot::Outer { i: e.u, j: e.v, edge: k });
        slots.push(Slot::Inner { i: e.u, j: e.v, edge: k });
        slots.push(Slot::Inner { i: e.v, j: e.u, edge: k });
        slots.push(Slot::Outer { i: e.v, j: e.u, edge: k });
        first_edge.push(edges.len());
        for s in 0..inst.capacity(e.u) as usize {
            edges.push(GadgetEdge { a: copy_start[e.u] + s, b: g, edge: k });
        }
        for t in 0..3 {
            edges.push(GadgetEdge { a: g + t, b: g + t + 1, edge: k });
        }
        for t in 0..inst.capacity(e.v) as usize {
            edges.push(GadgetEdge { a: g + 3, b: copy_start[e.v] + t, edge: k });
        }
    }
    Layout { n_vertices: slots.len(), copy_start, gadget_start, first_edge, edges, slots }
}

/// `(G', 1, w')` with provenance of every new player.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub instance: Instance,
    pub provenance: Vec<Slot>,
    layout: Layout,
}

/// JSON-friendly provenance record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProvenanceEntry {
    pub player: String,
    pub kind: &'static str,
    pub of: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copy: Option<u32>,
}

impl ReducedInstance {
    pub fn new(inst: &Instance) -> Self {
        reduce_instance(inst)
    }

    /// Reduced index of `i_j` for edge `k` and endpoint `i`.
    pub fn inner(&self, k: usize, i: usize) -> usize {
        let g = self.layout.gadget_start[k];
        if matches!(self.provenance[g + 1], Slot::Inner { i: x, .. } if x == i) {
            g + 1
        } else {
            g + 2
        }
    }

    /// Reduced index of `ī_j` for edge `k` and endpoint `i`.
    pub fn outer(&self, k: usize, i: usize) -> usize {
        let g = self.layout.gadget_start[k];
        if matches!(self.provenance[g], Slot::Outer { i: x, .. } if x == i) {
            g
        } else {
            g + 3
        }
    }

    /// Reduced index of `i^s` (`s` from 1).
    pub fn copy(&self, i: usize, s: u32) -> usize {
        self.layout.copy_start[i] + s as usize - 1
    }

    pub fn provenance_entries(&self, inst: &Instance) -> Vec<ProvenanceEntry> {
        self.provenance
            .iter()
            .enumerate()
            .map(|(v, slot)| {
                let player = self.instance.id(v).to_string();
                match *slot {
                    Slot::Copy { player: i, s } => ProvenanceEntry {
                        player,
                        kind: "copy",
                        of: inst.id(i).into(),
                        partner: None,
                        copy: Some(s),
                    },
                    Slot::Outer { i, j, .. } => ProvenanceEntry {
                        player,
                        kind: "outer",
                        of: inst.id(i).into(),
                        partner: Some(inst.id(j).into()),
                        copy: None,
                    },
                    Slot::Inner { i, j, .. } => ProvenanceEntry {
                        player,
                        kind: "inner",
                        of: inst.id(i).into(),
                        partner: Some(inst.id(j).into()),
                        copy: None,
                    },
                }
            })
            .collect()
    }
}

pub fn reduce_instance(inst: &Instance) -> ReducedInstance {
    let layout = gadget_layout(inst);
    let edges: Vec<Edge> = layout
        .edges
        .iter()
        .map(|g| Edge { u: g.a, v: g.b, w: inst.weight_of(g.edge).clone() })
        .collect();
    let names: Vec<String> = layout
        .slots
        .iter()
        .map(|slot| match *slot {
            Slot::Copy { player, s } => format!("{}^{s}", inst.id(player)),
            Slot::Outer { i, j, .. } => format!("~{}_{}", inst.id(i), inst.id(j)),
            Slot::Inner { i, j, .. } => format!("{}_{}", inst.id(i), inst.id(j)),
        })
        .collect();
    let ones = vec![1; layout.n_vertices];
    let instance = Instance::new(names, ones.clone(), edges.clone())
        .or_else(|_| Instance::new((0..layout.n_vertices).map(|v| format!("#{v}")).collect(), ones, edges))
        .expect("reduced instance is valid");
    ReducedInstance { instance, provenance: layout.slots.clone(), layout }
}

/// Rank (from 1) of every matched partner, by ascending neighbour index.
fn partner_ranks(inst: &Instance, m: &BMatching) -> Vec<[u32; 2]> {
    let mut rank = vec![[0u32; 2]; inst.m()];
    for i in 0..inst.n() {
        let mut r = 0;
        for &(_, k) in inst.adj(i) {
            if m.contains(k) {
                r += 1;
                let side = if inst.edge(k).u == i { 0 } else { 1 };
                rank[k][side] = r;
            }
        }
    }
    rank
}

/// The matching `M'` of the reduced graph induced by a b-matching `M`;
/// `w'(M') = w(M) + 2 w(E)`.
pub fn reduce_matching(inst: &Instance, reduced: &ReducedInstance, m: &BMatching) -> BMatching {
    let lay = &reduced.layout;
    let rank = partner_ranks(inst, m);
    let mut out = BMatching::new();
    for (k, e) in inst.edges().iter().enumerate() {
        let f = lay.first_edge[k];
        let bu = inst.capacity(e.u) as usize;
        if m.contains(k) {
            out.insert(f + rank[k][0] as usize - 1);
            out.insert(f + bu + 1);
            out.insert(f + bu + 3 + rank[k][1] as usize - 1);
        } else {
            out.insert(f + bu);
            out.insert(f + bu + 2);
        }
    }
    out
}

/// A unit-capacity solution with payoffs stored per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrpSolution {
    pub matching: BMatching,
    pub payoff: Vec<Q>,
}

impl SrpSolution {
    /// The same solution as a payoff matrix on the reduced instance.
    pub fn to_solution(&self, srp: &Instance) -> Solution {
        let mut p = PayoffMatrix::zeros(srp);
        for k in self.matching.iter() {
            let e = srp.edge(k);
            p.pair_mut(k)[0] = self.payoff[e.u].clone();
            p.pair_mut(k)[1] = self.payoff[e.v].clone();
        }
        Solution::new(self.matching.clone(), p)
    }

    /// Per-player totals of a compatible unit-capacity solution.
    pub fn from_solution(srp: &Instance, sol: &Solution) -> Result<Self> {
        check_compatible(srp, sol)?;
        let payoff = crate::stability::total_payoff(srp, &sol.payoffs);
        Ok(SrpSolution { matching: sol.matching.clone(), payoff })
    }
}

/// The reduced solution `(M', p')` of a compatible solution `(M, p)`.
pub fn reduce_solution(inst: &Instance, reduced: &ReducedInstance, sol: &Solution) -> Result<SrpSolution> {
    check_compatible(inst, sol)?;
    let u = utilities_unchecked(inst, sol);
    let mut payoff = vec![Q::zero(); reduced.instance.n()];
    for i in 0..inst.n() {
        for s in 1..=inst.capacity(i) {
            payoff[reduced.copy(i, s)] = u[i].clone();
        }
    }
    for (k, e) in inst.edges().iter().enumerate() {
        for (i, j) in [(e.u, e.v), (e.v, e.u)] {
            let _ = j;
            let inner = if sol.matching.contains(k) {
                sol.payoffs.get(inst, k, i).clone()
            } else {
                u[i].clone().min(e.w.clone())
            };
            let outer = if sol.matching.contains(k) { &e.w - &u[i] } else { &e.w - &inner };
            payoff[reduced.inner(k, i)] = inner;
            payoff[reduced.outer(k, i)] = outer;
        }
    }
    let matching = reduce_matching(inst, reduced, &sol.matching);
    Ok(SrpSolution { matching, payoff })
}

fn require_unit(srp: &Instance) -> Result<()> {
    if srp.capacities().iter().any(|&b| b != 1) {
        return Err(Error::Precondition("unit capacities required".into()));
    }
    Ok(())
}

/// Compatibility of a per-player unit-capacity solution.
pub fn srp_check_compatible(srp: &Instance, sol: &SrpSolution) -> Result<()> {
    require_unit(srp)?;
    if sol.payoff.len() != srp.n() {
        return Err(Error::Incompatible(format!("{} payoffs for {} players", sol.payoff.len(), srp.n())));
    }
    if !is_b_matching(srp, &sol.matching) {
        return Err(Error::NotBMatching);
    }
    if let Some(i) = sol.payoff.iter().position(|q| q.is_negative()) {
        return Err(Error::Incompatible(format!("negative payoff for {}", srp.id(i))));
    }
    let deg = sol.matching.degrees(srp);
    for (i, d) in deg.iter().enumerate() {
        if *d == 0 && !sol.payoff[i].is_zero() {
            return Err(Error::Incompatible(format!("unmatched {} has nonzero payoff", srp.id(i))));
        }
    }
    for k in sol.matching.iter() {
        let e = srp.edge(k);
        if &sol.payoff[e.u] + &sol.payoff[e.v] != e.w {
            return Err(Error::Incompatible(format!("payoffs on {}-{} do not sum to its weight", srp.id(e.u), srp.id(e.v))));
        }
    }
    Ok(())
}

pub fn srp_is_stable(srp: &Instance, sol: &SrpSolution) -> Result<StabilityVerdict> {
    srp_check_compatible(srp, sol)?;
    let blocking: Vec<usize> = srp
        .edges()
        .iter()
        .enumerate()
        .filter(|(k, e)| !sol.matching.contains(*k) && &sol.payoff[e.u] + &sol.payoff[e.v] < e.w)
        .map(|(k, _)| k)
        .collect();
    Ok(if blocking.is_empty() { StabilityVerdict::Stable } else { StabilityVerdict::Unstable { blocking } })
}

/// Keeps the per-player payoffs of a stable unit-capacity solution and
/// moves them onto another maximum-weight matching `m_hat`.
pub fn srp_rematch(srp: &Instance, sol: &SrpSolution, m_hat: &BMatching) -> Result<SrpSolution> {
    if let StabilityVerdict::Unstable { blocking } = srp_is_stable(srp, sol)? {
        return Err(Error::NotStable(blocking.len()));
    }
    if !is_b_matching(srp, m_hat) {
        return Err(Error::NotBMatching);
    }
    // A stable solution's matching is optimal, so equal weight is the test.
    let (found, optimum) = (weight(srp, m_hat), weight(srp, &sol.matching));
    if found != optimum {
        return Err(Error::NotMaximum { found: found.to_string(), optimum: optimum.to_string() });
    }
    let moved = SrpSolution { matching: m_hat.clone(), payoff: sol.payoff.clone() };
    srp_check_compatible(srp, &moved)?;
    Ok(moved)
}

/// A stable solution of the original instance from a stable solution of the
/// reduced one: reduce a maximum-weight b-matching, rematch onto it, and read
/// `p(i, j) = p'(i_j)`.
pub fn lift_stable(inst: &Instance, reduced: &ReducedInstance, sol: &SrpSolution) -> Result<Solution> {
    let (m, _) = max_weight_b_matching(inst);
    let target = reduce_matching(inst, reduced, &m);
    let moved = srp_rematch(&reduced.instance, sol, &target)?;
    let mut p = PayoffMatrix::zeros(inst);
    for k in m.iter() {
        let e = inst.edge(k);
        p.pair_mut(k)[0] = moved.payoff[reduced.inner(k, e.u)].clone();
        p.pair_mut(k)[1] = moved.payoff[reduced.inner(k, e.v)].clone();
    }
    let out = Solution::new(m, p);
    require_stable(inst, &out)?;
    Ok(out)
}
