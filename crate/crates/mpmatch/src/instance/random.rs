//! Seeded random instances for property tests and the oracle command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{int, Q};

use super::{Edge, Instance};

#[derive(Debug, Clone)]
pub struct RandomParams {
    pub min_players: usize,
    pub max_players: usize,
    pub min_capacity: u32,
    pub max_capacity: u32,
    /// Probability of each possible edge.
    pub edge_probability: f64,
    /// Weights are drawn uniformly from `0..=max_weight`.
    pub max_weight: u32,
    /// Optional cap on the number of edges; extra edges are dropped.
    pub max_edges: Option<usize>,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            min_players: 2,
            max_players: 8,
            min_capacity: 1,
            max_capacity: 3,
            edge_probability: 0.45,
            max_weight: 5,
            max_edges: None,
        }
    }
}

fn draw_common<R: Rng>(rng: &mut R, p: &RandomParams) -> (Vec<String>, Vec<u32>) {
    let n = rng.gen_range(p.min_players..=p.max_players);
    let players = (0..n).map(|i| format!("p{i}")).collect();
    let capacity = (0..n).map(|_| rng.gen_range(p.min_capacity..=p.max_capacity)).collect();
    (players, capacity)
}

fn weight<R: Rng>(rng: &mut R, p: &RandomParams) -> Q {
    int(rng.gen_range(0..=p.max_weight) as i64)
}

fn finish(players: Vec<String>, capacity: Vec<u32>, mut edges: Vec<Edge>, p: &RandomParams) -> Instance {
    if let Some(cap) = p.max_edges {
        edges.truncate(cap);
    }
    Instance::new(players, capacity, edges).expect("generated instance is valid")
}

/// The generator used wherever a `--seed` is accepted.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random general instance; every pair becomes an edge independently.
pub fn random_instance<R: Rng>(rng: &mut R, p: &RandomParams) -> Instance {
    let (players, capacity) = draw_common(rng, p);
    let n = players.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p.edge_probability) {
                edges.push(Edge { u, v, w: weight(rng, p) });
            }
        }
    }
    finish(players, capacity, edges, p)
}

/// Random bipartite instance; even-indexed players form one side.
pub fn random_bipartite_instance<R: Rng>(rng: &mut R, p: &RandomParams) -> Instance {
    let (players, capacity) = draw_common(rng, p);
    let n = players.len();
    let mut edges = Vec::new();
    for u in (0..n).step_by(2) {
        for v in (1..n).step_by(2) {
            if rng.gen_bool(p.edge_probability) {
                edges.push(Edge { u: u.min(v), v: u.max(v), w: weight(rng, p) });
            }
        }
    }
    finish(players, capacity, edges, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let p = RandomParams::default();
        let a = random_instance(&mut seeded_rng(7), &p);
        let b = random_instance(&mut seeded_rng(7), &p);
        assert_eq!(a, b);
    }

    #[test]
    fn bipartite_generator_is_bipartite() {
        let p = RandomParams::default();
        let mut rng = seeded_rng(1);
        for _ in 0..50 {
            assert!(random_bipartite_instance(&mut rng, &p).is_bipartite());
        }
    }
}
