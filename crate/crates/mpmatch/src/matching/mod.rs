//! b-matchings, half-b-matchings and the exact maximum-weight engines.

pub mod blossom;
mod bipartite;
mod brute;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance};
use crate::rational::{self, frac, Q};
use crate::reduction::{gadget_layout, Slot};

pub use bipartite::{bipartite_max_weight_b_matching_with_duals, BipartiteDualCertificate};
pub use brute::{lex_preferred, max_weight_b_matching_bruteforce, max_weight_b_matching_bruteforce_with_bound, BRUTE_FORCE_EDGE_BOUND};

/// A set of edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BMatching {
    edges: BTreeSet<usize>,
}

impl BMatching {
    pub fn new() -> Self {
        Self::default()
    }

    /// Resolves `(u, v)` player-id pairs to edges.
    pub fn from_ids<S: AsRef<str>>(inst: &Instance, pairs: &[(S, S)]) -> Result<Self> {
        pairs.iter().map(|(u, v)| inst.edge_by_ids(u.as_ref(), v.as_ref())).collect()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.edges.contains(&k)
    }

    pub fn insert(&mut self, k: usize) -> bool {
        self.edges.insert(k)
    }

    pub fn remove(&mut self, k: usize) -> bool {
        self.edges.remove(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Sorted edge indices.
    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Matched degree of every player.
    pub fn degrees(&self, inst: &Instance) -> Vec<u32> {
        let mut deg = vec![0u32; inst.n()];
        for k in self.iter() {
            let e = inst.edge(k);
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// `(u, v)` id pairs in edge order.
    pub fn id_pairs(&self, inst: &Instance) -> Vec<(String, String)> {
        self.iter().map(|k| (inst.id(inst.edge(k).u).to_string(), inst.id(inst.edge(k).v).to_string())).collect()
    }
}

impl FromIterator<usize> for BMatching {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        BMatching { edges: iter.into_iter().collect() }
    }
}

/// True iff every index is an edge of `inst` and no player exceeds its capacity.
pub fn is_b_matching(inst: &Instance, m: &BMatching) -> bool {
    if m.iter().any(|k| k >= inst.m()) {
        return false;
    }
    m.degrees(inst).iter().enumerate().all(|(i, &d)| d <= inst.capacity(i))
}

/// `w(M)`.
pub fn weight(inst: &Instance, m: &BMatching) -> Q {
    m.iter().fold(Q::zero(), |acc, k| acc + inst.weight_of(k))
}

/// A maximum-weight b-matching and its weight.
///
/// Runs the blossom engine on the gadget graph with every weight scaled to
/// an integer and perturbed by `2^(m-1-k)` on edge `k`, so that among all
/// optimal b-matchings the lexicographically smallest sorted edge list wins.
pub fn max_weight_b_matching(inst: &Instance) -> (BMatching, Q) {
    let m = inst.m();
    if m == 0 {
        return (BMatching::new(), Q::zero());
    }
    let layout = gadget_layout(inst);
    let denom = rational::common_denominator(inst.edges().iter().map(|e| &e.w));
    let scaled: Vec<BigInt> = inst
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let base = (e.w.numer() * &denom / e.w.denom()) << (m + 1);
            base + (BigInt::one() << (m - 1 - k))
        })
        .collect();
    let top = scaled.iter().map(|w| w.bits()).max().unwrap_or(0);
    let headroom = 64 - (layout.n_vertices as u64 + 1).leading_zeros() as u64;
    let mate = if top + headroom + 8 < 120 {
        let edges: Vec<(usize, usize, i128)> = layout
            .edges
            .iter()
            .map(|g| (g.a, g.b, i128::try_from(&scaled[g.edge]).expect("fits")))
            .collect();
        blossom::max_weight_matching(layout.n_vertices, &edges, false)
    } else {
        let edges: Vec<(usize, usize, BigInt)> =
            layout.edges.iter().map(|g| (g.a, g.b, scaled[g.edge].clone())).collect();
        blossom::max_weight_matching(layout.n_vertices, &edges, false)
    };
    let is_copy = |v: Option<usize>| v.is_some_and(|v| matches!(layout.slot(v), Slot::Copy { .. }));
    let chosen: BMatching = (0..m)
        .filter(|&k| {
            let g = layout.gadget_start[k];
            mate[g + 1] == Some(g + 2) && is_copy(mate[g]) && is_copy(mate[g + 3])
        })
        .collect();
    debug_assert!(is_b_matching(inst, &chosen));
    let w = weight(inst, &chosen);
    (chosen, w)
}

/// Origin of a player of the duplicated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DupSide {
    Prime,
    DoublePrime,
}

/// The bipartite double cover `(G^, b^, w^)` with its provenance.
#[derive(Debug, Clone)]
pub struct Duplicated {
    pub instance: Instance,
    /// For each new player, the original player and which copy it is.
    pub origin: Vec<(usize, DupSide)>,
}

impl Duplicated {
    /// New indices of `i'` and `i''`.
    pub fn copies(&self, i: usize) -> (usize, usize) {
        (i, i + self.origin.len() / 2)
    }

    /// New edge indices of `i'j''` and `i''j'` for original edge `k`.
    pub fn edge_pair(&self, k: usize) -> (usize, usize) {
        (2 * k, 2 * k + 1)
    }
}

/// Players `i'`, `i''` with `b(i)` each; edges `i'j''` and `i''j'` of weight `w(ij)/2`.
pub fn duplicated_instance(inst: &Instance) -> Duplicated {
    let n = inst.n();
    let mut origin: Vec<(usize, DupSide)> = (0..n).map(|i| (i, DupSide::Prime)).collect();
    origin.extend((0..n).map(|i| (i, DupSide::DoublePrime)));
    let mut capacity = inst.capacities().to_vec();
    capacity.extend_from_slice(inst.capacities());
    let half = frac(1, 2);
    let mut edges = Vec::with_capacity(2 * inst.m());
    for e in inst.edges() {
        let w = &e.w * &half;
        edges.push(Edge { u: e.u, v: e.v + n, w: w.clone() });
        edges.push(Edge { u: e.u + n, v: e.v, w });
    }
    let named = |fmt: &dyn Fn(usize, &str) -> String| -> Vec<String> {
        (0..n).map(|i| fmt(i, "'")).chain((0..n).map(|i| fmt(i, "''"))).collect()
    };
    let by_id = named(&|i, mark| format!("{}{mark}", inst.id(i)));
    let instance = Instance::new(by_id, capacity.clone(), edges.clone())
        .or_else(|_| Instance::new(named(&|i, mark| format!("#{i}{mark}")), capacity, edges))
        .expect("duplicated instance is valid");
    Duplicated { instance, origin }
}

/// Value of an edge in a half-b-matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Half {
    Zero,
    Half,
    One,
}

impl Half {
    pub fn value(self) -> Q {
        match self {
            Half::Zero => Q::zero(),
            Half::Half => frac(1, 2),
            Half::One => Q::one(),
        }
    }

    pub fn from_q(q: &Q) -> Option<Half> {
        if q.is_zero() {
            Some(Half::Zero)
        } else if *q == frac(1, 2) {
            Some(Half::Half)
        } else if q.is_one() {
            Some(Half::One)
        } else {
            None
        }
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Half::Zero => "0",
            Half::Half => "1/2",
            Half::One => "1",
        })
    }
}

/// `{0, 1/2, 1}`-valued edge weights with degree sums at most `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfBMatching {
    pub values: Vec<Half>,
}

impl HalfBMatching {
    pub fn weight(&self, inst: &Instance) -> Q {
        self.values
            .iter()
            .zip(inst.edges())
            .fold(Q::zero(), |acc, (h, e)| acc + h.value() * &e.w)
    }

    pub fn is_feasible(&self, inst: &Instance) -> bool {
        if self.values.len() != inst.m() {
            return false;
        }
        let mut load = vec![Q::zero(); inst.n()];
        for (h, e) in self.values.iter().zip(inst.edges()) {
            load[e.u] += h.value();
            load[e.v] += h.value();
        }
        load.iter().enumerate().all(|(i, l)| *l <= Q::from_integer(inst.capacity(i).into()))
    }
}

/// Half-b-matching read off a b-matching of the duplicated instance.
pub fn half_from_duplicated(dup: &Duplicated, inst: &Instance, m_hat: &BMatching) -> HalfBMatching {
    let values = (0..inst.m())
        .map(|k| {
            let (a, b) = dup.edge_pair(k);
            match (m_hat.contains(a) as u8) + (m_hat.contains(b) as u8) {
                0 => Half::Zero,
                1 => Half::Half,
                _ => Half::One,
            }
        })
        .collect();
    HalfBMatching { values }
}

/// Maximum weight of a half-b-matching, with a witness. Computed as the
/// optimum of the duplicated instance.
pub fn max_half_b_matching_weight(inst: &Instance) -> (Q, HalfBMatching) {
    let dup = duplicated_instance(inst);
    let (m_hat, _) = bipartite_max_weight_b_matching_with_duals(&dup.instance).expect("double cover is bipartite");
    let witness = half_from_duplicated(&dup, inst, &m_hat);
    let w = weight(&dup.instance, &m_hat);
    debug_assert_eq!(w, witness.weight(inst));
    (w, witness)
}

/// `Err(UnknownEdge)` for pairs that are not edges; otherwise the b-matching
/// check. Used by input layers that accept id pairs.
pub fn check_b_matching_ids<S: AsRef<str>>(inst: &Instance, pairs: &[(S, S)]) -> Result<(BMatching, bool)> {
    let m = BMatching::from_ids(inst, pairs)?;
    let ok = is_b_matching(inst, &m);
    Ok((m, ok))
}

/// Fails with `NotBMatching` unless `m` is a b-matching.
pub fn require_b_matching(inst: &Instance, m: &BMatching) -> Result<()> {
    if is_b_matching(inst, m) {
        Ok(())
    } else {
        Err(Error::NotBMatching)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{diamond, example2, example3, example4, single_edge, triangle, Instance};
    use crate::rational::int;

    #[test]
    fn example3_b_matching_checks() {
        let inst = example3();
        let ok = BMatching::from_ids(&inst, &[("v1", "v2"), ("v3", "v4")]).unwrap();
        assert!(is_b_matching(&inst, &ok));
        let bad = BMatching::from_ids(&inst, &[("v1", "v2"), ("v4", "v1")]).unwrap();
        assert!(!is_b_matching(&inst, &bad));
        assert!(is_b_matching(&inst, &BMatching::new()));
        assert!(matches!(BMatching::from_ids(&inst, &[("v1", "v3")]), Err(Error::UnknownEdge(..))));
    }

    #[test]
    fn weights_of_listed_matchings() {
        let inst = example2();
        let m = BMatching::from_ids(&inst, &[("u1", "v1"), ("u1", "v2"), ("u2", "v1"), ("u3", "v3")]).unwrap();
        assert_eq!(weight(&inst, &m), int(16));
        assert_eq!(weight(&inst, &BMatching::new()), int(0));
        let d = diamond();
        let m = BMatching::from_ids(&d, &[("s1", "s2"), ("s1", "s3"), ("s2", "s3")]).unwrap();
        assert_eq!(weight(&d, &m), int(3));
    }

    #[test]
    fn engine_on_named_instances() {
        assert_eq!(max_weight_b_matching(&example2()).1, int(16));
        assert_eq!(max_weight_b_matching(&diamond()).1, int(3));
        assert_eq!(max_weight_b_matching(&example4(2).unwrap().0).1, int(4));
        assert_eq!(max_weight_b_matching(&example4(3).unwrap().0).1, int(7));
        assert_eq!(max_weight_b_matching(&triangle()).1, int(1));
        let edgeless = Instance::build(&[("a", 2)], &[]).unwrap();
        let (m, w) = max_weight_b_matching(&edgeless);
        assert!(m.is_empty());
        assert!(w.is_zero());
    }

    #[test]
    fn engine_prefers_lexicographically_first_optimum() {
        // Both unit edges of the triangle are optimal; the first is chosen.
        let (m, _) = max_weight_b_matching(&triangle());
        assert_eq!(m.to_vec(), vec![0]);
        // Zero-weight edges are still taken when free.
        let z = Instance::build(&[("a", 1), ("b", 1)], &[("a", "b", int(0))]).unwrap();
        assert_eq!(max_weight_b_matching(&z).0.to_vec(), vec![0]);
    }

    #[test]
    fn duplicated_shapes() {
        let t = duplicated_instance(&triangle());
        assert_eq!((t.instance.n(), t.instance.m()), (6, 6));
        assert!(t.instance.edges().iter().all(|e| e.w == frac(1, 2)));
        assert!(t.instance.is_bipartite());
        let s = duplicated_instance(&single_edge(int(7), 1, 1));
        assert_eq!((s.instance.n(), s.instance.m()), (4, 2));
        assert!(s.instance.edges().iter().all(|e| e.w == frac(7, 2)));
        let d = duplicated_instance(&diamond());
        assert_eq!((d.instance.n(), d.instance.m()), (8, 10));
    }

    #[test]
    fn duplicated_ids_fall_back_on_collision() {
        let inst = Instance::build(&[("a", 1), ("a'", 1)], &[("a", "a'", int(1))]).unwrap();
        let d = duplicated_instance(&inst);
        assert_eq!(d.instance.n(), 4);
    }

    #[test]
    fn half_optima() {
        let (w, f) = max_half_b_matching_weight(&diamond());
        assert_eq!(w, frac(7, 2));
        assert!(f.is_feasible(&diamond()));
        assert_eq!(max_half_b_matching_weight(&triangle()).0, frac(3, 2));
        assert_eq!(max_half_b_matching_weight(&single_edge(int(7), 1, 1)).0, int(7));
    }

    /// Exhaustive half-b-matching optimum over all `3^m` assignments.
    fn half_enumeration(inst: &Instance) -> Q {
        let m = inst.m();
        let mut best = Q::zero();
        let mut code = vec![0u8; m];
        loop {
            let h = HalfBMatching {
                values: code.iter().map(|&c| [Half::Zero, Half::Half, Half::One][c as usize]).collect(),
            };
            if h.is_feasible(inst) {
                best = best.max(h.weight(inst));
            }
            let mut i = 0;
            while i < m && code[i] == 2 {
                code[i] = 0;
                i += 1;
            }
            if i == m {
                return best;
            }
            code[i] += 1;
        }
    }

    #[test]
    fn half_optimum_matches_enumeration() {
        for inst in [triangle(), diamond(), example3(), example4(2).unwrap().0] {
            assert_eq!(max_half_b_matching_weight(&inst).0, half_enumeration(&inst));
        }
    }
}
