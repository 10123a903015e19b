//! Solutions `(M, p)`, utilities, stability, equivalence, and the bipartite
//! lattice and competitive-equilibrium constructions.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matching::{is_b_matching, max_weight_b_matching, weight, BMatching};
use crate::rational::Q;
use crate::reduction::{reduce_matching, reduce_solution, srp_rematch, ReducedInstance};

/// Directed per-edge payoffs: `entries[k] = [p(u, v), p(v, u)]` for edge
/// `k = uv` in declared orientation. Entries may be negative only in the
/// intermediate matrices built by the core module.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PayoffMatrix {
    entries: Vec<[Q; 2]>,
}

impl PayoffMatrix {
    pub fn zeros(inst: &Instance) -> Self {
        PayoffMatrix { entries: vec![[Q::zero(), Q::zero()]; inst.m()] }
    }

    /// Builds from `(u, v, p(u,v), p(v,u))` id tuples; unspecified entries are 0.
    pub fn from_ids<S: AsRef<str>>(inst: &Instance, rows: &[(S, S, Q, Q)]) -> Result<Self> {
        let mut p = Self::zeros(inst);
        for (u, v, puv, pvu) in rows {
            let k = inst.edge_by_ids(u.as_ref(), v.as_ref())?;
            let i = inst.index_of(u.as_ref())?;
            p.set(inst, k, i, puv.clone());
            p.set(inst, k, inst.edge(k).other(i), pvu.clone());
        }
        Ok(p)
    }

    fn slot(inst: &Instance, k: usize, i: usize) -> usize {
        if inst.edge(k).u == i {
            0
        } else {
            assert_eq!(inst.edge(k).v, i, "player {i} is not an endpoint of edge {k}");
            1
        }
    }

    /// `p(i, j)` where edge `k = ij`.
    pub fn get(&self, inst: &Instance, k: usize, i: usize) -> &Q {
        &self.entries[k][Self::slot(inst, k, i)]
    }

    pub fn set(&mut self, inst: &Instance, k: usize, i: usize, value: Q) {
        self.entries[k][Self::slot(inst, k, i)] = value;
    }

    /// `p(i, j)` by player indices; `None` if `ij` is not an edge.
    pub fn between(&self, inst: &Instance, i: usize, j: usize) -> Option<&Q> {
        inst.edge_between(i, j).map(|k| self.get(inst, k, i))
    }

    /// Raw `[p(u,v), p(v,u)]` for edge `k`.
    pub fn pair(&self, k: usize) -> &[Q; 2] {
        &self.entries[k]
    }

    pub fn pair_mut(&mut self, k: usize) -> &mut [Q; 2] {
        &mut self.entries[k]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().flatten().all(|q| !q.is_negative())
    }

    pub fn negative_entries(&self) -> usize {
        self.entries.iter().flatten().filter(|q| q.is_negative()).count()
    }
}

/// A b-matching together with payoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub matching: BMatching,
    pub payoffs: PayoffMatrix,
}

impl Solution {
    pub fn new(matching: BMatching, payoffs: PayoffMatrix) -> Self {
        Solution { matching, payoffs }
    }
}

/// Checks that `M` is a b-matching, `p >= 0`, matched edges split exactly
/// `w(ij)`, and unmatched edges carry zero payoff.
pub fn check_compatible(inst: &Instance, sol: &Solution) -> Result<()> {
    if sol.payoffs.len() != inst.m() {
        return Err(Error::Incompatible(format!("{} payoff pairs for {} edges", sol.payoffs.len(), inst.m())));
    }
    if !is_b_matching(inst, &sol.matching) {
        return Err(Error::NotBMatching);
    }
    for (k, e) in inst.edges().iter().enumerate() {
        let [a, b] = sol.payoffs.pair(k);
        let name = || format!("{}-{}", inst.id(e.u), inst.id(e.v));
        if a.is_negative() || b.is_negative() {
            return Err(Error::Incompatible(format!("negative payoff on {}", name())));
        }
        if sol.matching.contains(k) {
            if a + b != e.w {
                return Err(Error::Incompatible(format!("payoffs on {} do not sum to its weight", name())));
            }
        } else if !a.is_zero() || !b.is_zero() {
            return Err(Error::Incompatible(format!("unmatched edge {} has nonzero payoff", name())));
        }
    }
    Ok(())
}

pub fn is_compatible(inst: &Instance, sol: &Solution) -> bool {
    check_compatible(inst, sol).is_ok()
}

/// `u_p(i)`: the smallest payoff over matched partners for saturated
/// players, 0 for unsaturated ones.
pub fn utilities(inst: &Instance, sol: &Solution) -> Result<Vec<Q>> {
    check_compatible(inst, sol)?;
    Ok(utilities_unchecked(inst, sol))
}

pub(crate) fn utilities_unchecked(inst: &Instance, sol: &Solution) -> Vec<Q> {
    let deg = sol.matching.degrees(inst);
    (0..inst.n())
        .map(|i| {
            if deg[i] < inst.capacity(i) {
                return Q::zero();
            }
            inst.adj(i)
                .iter()
                .filter(|&&(_, k)| sol.matching.contains(k))
                .map(|&(_, k)| sol.payoffs.get(inst, k, i).clone())
                .min()
                .unwrap_or_else(Q::zero)
        })
        .collect()
}

/// Outcome of a stability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    /// Every unmatched edge `ij` with `u(i) + u(j) < w(ij)`.
    Unstable { blocking: Vec<usize> },
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::Stable)
    }
}

pub fn is_stable(inst: &Instance, sol: &Solution) -> Result<StabilityVerdict> {
    let u = utilities(inst, sol)?;
    let blocking: Vec<usize> = inst
        .edges()
        .iter()
        .enumerate()
        .filter(|(k, e)| !sol.matching.contains(*k) && &u[e.u] + &u[e.v] < e.w)
        .map(|(k, _)| k)
        .collect();
    Ok(if blocking.is_empty() { StabilityVerdict::Stable } else { StabilityVerdict::Unstable { blocking } })
}

pub(crate) fn require_stable(inst: &Instance, sol: &Solution) -> Result<()> {
    match is_stable(inst, sol)? {
        StabilityVerdict::Stable => Ok(()),
        StabilityVerdict::Unstable { blocking } => Err(Error::NotStable(blocking.len())),
    }
}

/// Row sums `p^t(i) = sum_j p(i, j)`.
pub fn total_payoff(inst: &Instance, p: &PayoffMatrix) -> Vec<Q> {
    let mut x = vec![Q::zero(); inst.n()];
    for (k, e) in inst.edges().iter().enumerate() {
        let [a, b] = p.pair(k);
        x[e.u] += a;
        x[e.v] += b;
    }
    x
}

/// The four-condition equivalence of two compatible solutions.
pub fn are_equivalent(inst: &Instance, a: &Solution, b: &Solution) -> Result<bool> {
    let ua = utilities(inst, a)?;
    let ub = utilities(inst, b)?;
    if ua != ub {
        return Ok(false);
    }
    for (k, e) in inst.edges().iter().enumerate() {
        let (in_a, in_b) = (a.matching.contains(k), b.matching.contains(k));
        let pinned = |s: &Solution| s.payoffs.pair(k)[0] == ua[e.u] && s.payoffs.pair(k)[1] == ua[e.v];
        let ok = match (in_a, in_b) {
            (true, true) => a.payoffs.pair(k) == b.payoffs.pair(k),
            (true, false) => pinned(a),
            (false, true) => pinned(b),
            (false, false) => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Moves a stable solution onto another maximum-weight b-matching `m_hat`,
/// keeping it stable and equivalent. Goes through the gadget reduction.
pub fn rematch(inst: &Instance, sol: &Solution, m_hat: &BMatching) -> Result<Solution> {
    require_stable(inst, sol)?;
    if !is_b_matching(inst, m_hat) {
        return Err(Error::NotBMatching);
    }
    let (_, optimum) = max_weight_b_matching(inst);
    let found = weight(inst, m_hat);
    if found != optimum {
        return Err(Error::NotMaximum { found: found.to_string(), optimum: optimum.to_string() });
    }
    let reduced = ReducedInstance::new(inst);
    let srp = reduce_solution(inst, &reduced, sol)?;
    let target = reduce_matching(inst, &reduced, m_hat);
    let moved = srp_rematch(&reduced.instance, &srp, &target)?;
    let mut p = PayoffMatrix::zeros(inst);
    for k in m_hat.iter() {
        let e = inst.edge(k);
        p.pair_mut(k)[0] = moved.payoff[reduced.inner(k, e.u)].clone();
        p.pair_mut(k)[1] = moved.payoff[reduced.inner(k, e.v)].clone();
    }
    Ok(Solution::new(m_hat.clone(), p))
}

/// Resolves the seller side of a bipartite instance.
///
/// With explicit sellers every edge must join a seller and a non-seller.
/// Without them a 2-colouring is used; this is only unambiguous when all
/// edges lie in one connected component (isolated players do not matter),
/// and then the side containing the lowest-indexed covered player sells.
pub fn resolve_sellers(inst: &Instance, sellers: Option<&[usize]>) -> Result<Vec<bool>> {
    let color = inst.two_coloring().ok_or(Error::NotBipartite)?;
    match sellers {
        Some(list) => {
            let mut is_seller = vec![false; inst.n()];
            for &i in list {
                is_seller[i] = true;
            }
            for e in inst.edges() {
                if is_seller[e.u] == is_seller[e.v] {
                    return Err(Error::AmbiguousSides(format!(
                        "edge {}-{} does not join a seller and a buyer",
                        inst.id(e.u),
                        inst.id(e.v)
                    )));
                }
            }
            Ok(is_seller)
        }
        None => {
            let comps = edge_components(inst);
            if comps > 1 {
                return Err(Error::AmbiguousSides(format!(
                    "{comps} components with edges; declare the sellers explicitly"
                )));
            }
            let first = inst.edges().first().map(|e| e.u.min(e.v));
            let seller_color = first.map(|i| color[i]).unwrap_or(0);
            Ok(color.iter().map(|&c| c == seller_color).collect())
        }
    }
}

fn edge_components(inst: &Instance) -> usize {
    let mut seen = vec![false; inst.n()];
    let mut comps = 0;
    for s in 0..inst.n() {
        if seen[s] || inst.degree(s) == 0 {
            continue;
        }
        comps += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(u, _) in inst.adj(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    comps
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    /// Sellers take the minimum, buyers the maximum.
    Join,
    /// Sellers take the maximum, buyers the minimum.
    Meet,
}

/// Entrywise lattice operation on two stable solutions of a bipartite
/// instance. `b` is first rematched onto `a`'s matching if they differ.
pub fn meet_join(inst: &Instance, a: &Solution, b: &Solution, op: LatticeOp, is_seller: &[bool]) -> Result<Solution> {
    if !inst.is_bipartite() {
        return Err(Error::NotBipartite);
    }
    require_stable(inst, a)?;
    require_stable(inst, b)?;
    let b = if a.matching == b.matching { b.clone() } else { rematch(inst, b, &a.matching)? };
    let mut p = PayoffMatrix::zeros(inst);
    for k in a.matching.iter() {
        let e = inst.edge(k);
        let (s, t) = if is_seller[e.u] { (e.u, e.v) } else { (e.v, e.u) };
        let (pa, pb) = (a.payoffs.get(inst, k, s), b.payoffs.get(inst, k, s));
        let seller = match op {
            LatticeOp::Join => pa.min(pb).clone(),
            LatticeOp::Meet => pa.max(pb).clone(),
        };
        p.set(inst, k, t, &e.w - &seller);
        p.set(inst, k, s, seller);
    }
    Ok(Solution::new(a.matching.clone(), p))
}

/// Every seller receives exactly `u_p(i)` from each matched buyer.
pub fn to_competitive_equilibrium(inst: &Instance, sol: &Solution, is_seller: &[bool]) -> Result<Solution> {
    if !inst.is_bipartite() {
        return Err(Error::NotBipartite);
    }
    require_stable(inst, sol)?;
    let u = utilities_unchecked(inst, sol);
    let mut p = PayoffMatrix::zeros(inst);
    for k in sol.matching.iter() {
        let e = inst.edge(k);
        let (s, t) = if is_seller[e.u] { (e.u, e.v) } else { (e.v, e.u) };
        p.set(inst, k, s, u[s].clone());
        p.set(inst, k, t, &e.w - &u[s]);
    }
    Ok(Solution::new(sol.matching.clone(), p))
}
