//! Game instances `(G, b, w)`: players with capacities and weighted edges.

mod families;
mod random;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Q};

pub use families::{
    cubic_gadget, diamond, example1, example2, example3, example4, generate, single_edge,
    triangle, two_player, Family, Generated,
};
pub use random::{random_bipartite_instance, random_instance, seeded_rng, RandomParams};

/// Weighted edge between player indices `u` and `v` (as declared).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Q,
}

impl Edge {
    /// The endpoint opposite to `i`.
    pub fn other(&self, i: usize) -> usize {
        if self.u == i {
            self.v
        } else {
            debug_assert_eq!(self.v, i);
            self.u
        }
    }

    pub fn has(&self, i: usize) -> bool {
        self.u == i || self.v == i
    }
}

/// Wire form of an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub u: String,
    pub v: String,
    #[serde(with = "weight_text")]
    pub w: String,
}

/// Wire form of an instance, before validation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub players: Vec<String>,
    pub capacity: BTreeMap<String, i64>,
    pub edges: Vec<EdgeSpec>,
}

mod weight_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &str, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(w)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Num(serde_json::Number),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Text(t) => t,
            Raw::Num(n) => n.to_string(),
        })
    }
}

/// Kinds of invariant violations found by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    EmptyId,
    DuplicatePlayer,
    MissingCapacity,
    NegativeCapacity,
    CapacityForUnknownPlayer,
    UnknownEndpoint,
    Loop,
    DuplicateEdge,
    BadWeight,
    NegativeWeight,
}

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::EmptyId => "empty id",
            ViolationKind::DuplicatePlayer => "duplicate player",
            ViolationKind::MissingCapacity => "missing capacity",
            ViolationKind::NegativeCapacity => "negative capacity",
            ViolationKind::CapacityForUnknownPlayer => "capacity for unknown player",
            ViolationKind::UnknownEndpoint => "unknown endpoint",
            ViolationKind::Loop => "loop",
            ViolationKind::DuplicateEdge => "duplicate edge",
            ViolationKind::BadWeight => "bad weight",
            ViolationKind::NegativeWeight => "negative weight",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

/// Every invariant violation of an [`InstanceSpec`]; empty when valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.kind.label(), v.detail))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Reports every invariant violation of a raw instance.
pub fn validate(spec: &InstanceSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = HashSet::new();
    for p in &spec.players {
        if p.is_empty() {
            report.push(ViolationKind::EmptyId, "player id is empty".into());
        }
        if !seen.insert(p.as_str()) {
            report.push(ViolationKind::DuplicatePlayer, format!("{p:?}"));
        }
    }
    for p in &spec.players {
        match spec.capacity.get(p) {
            None => report.push(ViolationKind::MissingCapacity, format!("{p:?}")),
            Some(&c) if c < 0 => report.push(ViolationKind::NegativeCapacity, format!("{p:?}: {c}")),
            Some(&c) if c > u32::MAX as i64 => {
                report.push(ViolationKind::NegativeCapacity, format!("{p:?}: {c} out of range"))
            }
            _ => {}
        }
    }
    for p in spec.capacity.keys() {
        if !seen.contains(p.as_str()) {
            report.push(ViolationKind::CapacityForUnknownPlayer, format!("{p:?}"));
        }
    }
    let mut pairs = HashSet::new();
    for e in &spec.edges {
        for end in [&e.u, &e.v] {
            if !seen.contains(end.as_str()) {
                report.push(ViolationKind::UnknownEndpoint, format!("{end:?} in edge {}-{}", e.u, e.v));
            }
        }
        if e.u == e.v {
            report.push(ViolationKind::Loop, format!("{}-{}", e.u, e.v));
        } else {
            let key = if e.u < e.v { (&e.u, &e.v) } else { (&e.v, &e.u) };
            if !pairs.insert(key) {
                report.push(ViolationKind::DuplicateEdge, format!("{}-{}", e.u, e.v));
            }
        }
        match rational::parse(&e.w) {
            Err(_) => report.push(ViolationKind::BadWeight, format!("{}-{}: {:?}", e.u, e.v, e.w)),
            Ok(w) if w.is_negative() => {
                report.push(ViolationKind::NegativeWeight, format!("{}-{}: {}", e.u, e.v, e.w))
            }
            Ok(_) => {}
        }
    }
    report
}

/// A validated, immutable game instance with dense indices in declared order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceSpec", into = "InstanceSpec")]
pub struct Instance {
    players: Vec<String>,
    capacity: Vec<u32>,
    edges: Vec<Edge>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    #[serde(skip)]
    adj: Vec<Vec<(usize, usize)>>,
    #[serde(skip)]
    lookup: HashMap<(usize, usize), usize>,
}

impl Instance {
    /// Builds an instance from indexed data, checking every invariant.
    pub fn new(players: Vec<String>, capacity: Vec<u32>, edges: Vec<Edge>) -> Result<Self> {
        let spec = InstanceSpec {
            capacity: players
                .iter()
                .zip(capacity.iter().chain(std::iter::repeat(&0)))
                .map(|(p, &c)| (p.clone(), c as i64))
                .collect(),
            edges: edges
                .iter()
                .map(|e| EdgeSpec {
                    u: players.get(e.u).cloned().unwrap_or_default(),
                    v: players.get(e.v).cloned().unwrap_or_default(),
                    w: rational::format(&e.w),
                })
                .collect(),
            players,
        };
        if capacity.len() != spec.players.len() || edges.iter().any(|e| e.u >= spec.players.len() || e.v >= spec.players.len()) {
            return Err(Error::Precondition("index out of range while building instance".into()));
        }
        Self::from_spec(&spec)
    }

    /// Shorthand for generators: players by name, all edges by name pair.
    pub fn build(players: &[(&str, u32)], edges: &[(&str, &str, Q)]) -> Result<Self> {
        let spec = InstanceSpec {
            players: players.iter().map(|(p, _)| p.to_string()).collect(),
            capacity: players.iter().map(|(p, c)| (p.to_string(), *c as i64)).collect(),
            edges: edges
                .iter()
                .map(|(u, v, w)| EdgeSpec { u: u.to_string(), v: v.to_string(), w: rational::format(w) })
                .collect(),
        };
        Self::from_spec(&spec)
    }

    pub fn from_spec(spec: &InstanceSpec) -> Result<Self> {
        let report = validate(spec);
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        let index: HashMap<String, usize> =
            spec.players.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let capacity = spec.players.iter().map(|p| spec.capacity[p] as u32).collect();
        let edges = spec
            .edges
            .iter()
            .map(|e| Edge { u: index[&e.u], v: index[&e.v], w: rational::parse(&e.w).expect("validated") })
            .collect();
        Ok(Self::assemble(spec.players.clone(), capacity, edges, index))
    }

    fn assemble(players: Vec<String>, capacity: Vec<u32>, edges: Vec<Edge>, index: HashMap<String, usize>) -> Self {
        let mut adj = vec![Vec::new(); players.len()];
        let mut lookup = HashMap::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, k));
            adj[e.v].push((e.u, k));
            lookup.insert(key(e.u, e.v), k);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Instance { players, capacity, edges, index, adj, lookup }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: InstanceSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec {
            players: self.players.clone(),
            capacity: self.players.iter().cloned().zip(self.capacity.iter().map(|&c| c as i64)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    u: self.players[e.u].clone(),
                    v: self.players[e.v].clone(),
                    w: rational::format(&e.w),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("serializable")
    }

    pub fn n(&self) -> usize {
        self.players.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn id(&self, i: usize) -> &str {
        &self.players[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownPlayer(id.to_string()))
    }

    pub fn capacity(&self, i: usize) -> u32 {
        self.capacity[i]
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacity
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    pub fn weight_of(&self, k: usize) -> &Q {
        &self.edges[k].w
    }

    /// `(neighbour, edge index)` pairs sorted by neighbour index.
    pub fn adj(&self, i: usize) -> &[(usize, usize)] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edge_between(&self, i: usize, j: usize) -> Option<usize> {
        self.lookup.get(&key(i, j)).copied()
    }

    /// Edge index for a pair of player ids.
    pub fn edge_by_ids(&self, u: &str, v: &str) -> Result<usize> {
        let (i, j) = (self.index_of(u)?, self.index_of(v)?);
        self.edge_between(i, j).ok_or_else(|| Error::UnknownEdge(u.to_string(), v.to_string()))
    }

    /// `w(E)`.
    pub fn total_weight(&self) -> Q {
        self.edges.iter().fold(Q::zero(), |acc, e| acc + &e.w)
    }

    pub fn max_capacity(&self) -> u32 {
        self.capacity.iter().copied().max().unwrap_or(0)
    }

    pub fn capacity_sum(&self) -> u64 {
        self.capacity.iter().map(|&c| c as u64).sum()
    }

    /// A proper 2-colouring (colour 0 for the first vertex of each component), if one exists.
    pub fn two_coloring(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.n()];
        for s in 0..self.n() {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(u, _) in &self.adj[v] {
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        stack.push(u);
                    } else if color[u] == color[v] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_coloring().is_some()
    }

    /// `G[S]` with `b` and `w` restricted; players and edges keep their relative order.
    pub fn induced(&self, s: &Coalition) -> Instance {
        self.induced_with_map(s).0
    }

    /// As [`Instance::induced`], also returning the original index of every
    /// retained player and edge.
    pub fn induced_with_map(&self, s: &Coalition) -> (Instance, Vec<usize>, Vec<usize>) {
        let mut new_index = vec![usize::MAX; self.n()];
        let mut players = Vec::with_capacity(s.len());
        let mut capacity = Vec::with_capacity(s.len());
        for (t, &i) in s.members().iter().enumerate() {
            new_index[i] = t;
            players.push(self.players[i].clone());
            capacity.push(self.capacity[i]);
        }
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if new_index[e.u] != usize::MAX && new_index[e.v] != usize::MAX {
                edges.push(Edge { u: new_index[e.u], v: new_index[e.v], w: e.w.clone() });
                edge_map.push(k);
            }
        }
        let index = players.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let inst = Instance::assemble(players, capacity, edges, index);
        (inst, s.members().to_vec(), edge_map)
    }

    /// Same graph with every capacity replaced.
    pub fn with_capacities(&self, capacity: Vec<u32>) -> Instance {
        assert_eq!(capacity.len(), self.n());
        Instance::assemble(self.players.clone(), capacity, self.edges.clone(), self.index.clone())
    }
}

impl TryFrom<InstanceSpec> for Instance {
    type Error = Error;

    fn try_from(spec: InstanceSpec) -> Result<Self> {
        Instance::from_spec(&spec)
    }
}

impl From<Instance> for InstanceSpec {
    fn from(inst: Instance) -> Self {
        inst.to_spec()
    }
}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// A set of players of some instance, kept sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition {
    members: Vec<usize>,
}

impl Coalition {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Coalition { members }
    }

    pub fn all(inst: &Instance) -> Self {
        Coalition { members: (0..inst.n()).collect() }
    }

    pub fn from_ids<S: AsRef<str>>(inst: &Instance, ids: &[S]) -> Result<Self> {
        let members = ids.iter().map(|id| inst.index_of(id.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(Coalition::new(members))
    }

    /// Members of the bit mask `mask` over player indices.
    pub fn from_mask(mask: u64) -> Self {
        Coalition { members: (0..64).filter(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn ids(&self, inst: &Instance) -> Vec<String> {
        self.members.iter().map(|&i| inst.id(i).to_string()).collect()
    }

    /// Sum of `x` over the members.
    pub fn sum(&self, x: &[Q]) -> Q {
        self.members.iter().fold(Q::zero(), |acc, &i| acc + &x[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn spec(edges: &[(&str, &str, &str)]) -> InstanceSpec {
        InstanceSpec {
            players: vec!["a".into(), "b".into(), "c".into()],
            capacity: [("a", 1), ("b", 1), ("c", 1)].iter().map(|(p, c)| (p.to_string(), *c)).collect(),
            edges: edges
                .iter()
                .map(|(u, v, w)| EdgeSpec { u: u.to_string(), v: v.to_string(), w: w.to_string() })
                .collect(),
        }
    }

    #[test]
    fn triangle_is_valid() {
        let r = validate(&spec(&[("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1")]));
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn loop_is_reported() {
        let r = validate(&spec(&[("a", "a", "1")]));
        assert!(r.has(ViolationKind::Loop));
        assert_eq!(ViolationKind::Loop.label(), "loop");
    }

    #[test]
    fn negative_weight_is_reported() {
        let r = validate(&spec(&[("a", "b", "-1")]));
        assert!(r.has(ViolationKind::NegativeWeight));
        assert_eq!(ViolationKind::NegativeWeight.label(), "negative weight");
    }

    #[test]
    fn every_violation_is_listed() {
        let mut s = spec(&[("a", "b", "1"), ("b", "a", "2"), ("a", "z", "x")]);
        s.players.push("a".into());
        s.capacity.insert("q".into(), 1);
        s.capacity.insert("b".into(), -2);
        let r = validate(&s);
        for k in [
            ViolationKind::DuplicateEdge,
            ViolationKind::UnknownEndpoint,
            ViolationKind::BadWeight,
            ViolationKind::DuplicatePlayer,
            ViolationKind::CapacityForUnknownPlayer,
            ViolationKind::NegativeCapacity,
        ] {
            assert!(r.has(k), "{k:?} missing from {r}");
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"players":["u1","v1"],"capacity":{"u1":2,"v1":1},"edges":[{"u":"u1","v":"v1","w":"7/2"}]}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.weight_of(0), &crate::rational::frac(7, 2));
        let again: Instance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn numeric_weights_accepted() {
        let text = r#"{"players":["a","b"],"capacity":{"a":1,"b":1},"edges":[{"u":"a","v":"b","w":2.5}]}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.weight_of(0), &crate::rational::frac(5, 2));
    }

    #[test]
    fn induced_example2() {
        let inst = example2();
        let s = Coalition::from_ids(&inst, &["u1", "v1", "v2"]).unwrap();
        let sub = inst.induced(&s);
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.m(), 2);
        assert_eq!(sub.weight_of(sub.edge_by_ids("u1", "v1").unwrap()), &int(4));
        assert_eq!(sub.weight_of(sub.edge_by_ids("u1", "v2").unwrap()), &int(6));
    }

    #[test]
    fn induced_extremes() {
        let inst = example2();
        let empty = inst.induced(&Coalition::default());
        assert_eq!((empty.n(), empty.m()), (0, 0));
        assert_eq!(inst.induced(&Coalition::all(&inst)), inst);
    }

    #[test]
    fn induced_unknown_player() {
        let inst = example2();
        assert!(matches!(Coalition::from_ids(&inst, &["nope"]), Err(Error::UnknownPlayer(_))));
    }

    #[test]
    fn adjacency_sorted_by_neighbour() {
        let inst = diamond();
        for i in 0..inst.n() {
            let nbrs: Vec<usize> = inst.adj(i).iter().map(|&(j, _)| j).collect();
            let mut sorted = nbrs.clone();
            sorted.sort();
            assert_eq!(nbrs, sorted);
        }
    }

    #[test]
    fn bipartite_detection() {
        assert!(example2().is_bipartite());
        assert!(!triangle().is_bipartite());
    }
}
