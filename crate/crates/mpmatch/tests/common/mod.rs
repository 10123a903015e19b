#![allow(dead_code)]

use mpmatch::instance::{random_bipartite_instance, random_instance, seeded_rng, Instance, RandomParams};
use mpmatch::matching::{is_b_matching, weight, BMatching};
use mpmatch::rational::{frac, Q};
use mpmatch::stability::{total_payoff, PayoffMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded_rng(seed)
}

pub fn params(max_players: usize, max_capacity: u32, max_weight: u32) -> RandomParams {
    RandomParams { min_players: 2, max_players, min_capacity: 1, max_capacity, max_weight, ..RandomParams::default() }
}

pub fn general(r: &mut ChaCha8Rng, p: &RandomParams) -> Instance {
    random_instance(r, p)
}

pub fn bipartite(r: &mut ChaCha8Rng, p: &RandomParams) -> Instance {
    random_bipartite_instance(r, p)
}

/// Random split `p(i, j) = t w(ij)` with `t` in `{0, 1/4, ..., 1}` on each edge of `m`.
pub fn random_split(inst: &Instance, m: &BMatching, r: &mut ChaCha8Rng) -> PayoffMatrix {
    let mut p = PayoffMatrix::zeros(inst);
    for k in m.iter() {
        let w = inst.weight_of(k).clone();
        let a = &w * frac(r.gen_range(0..=4), 4);
        *p.pair_mut(k) = [a.clone(), w - a];
    }
    p
}

pub fn split_allocation(inst: &Instance, m: &BMatching, r: &mut ChaCha8Rng) -> Vec<Q> {
    total_payoff(inst, &random_split(inst, m, r))
}

/// Moves `delta` from one random player to another; keeps `x(N)`.
pub fn shuffle_mass(x: &[Q], r: &mut ChaCha8Rng) -> Vec<Q> {
    let mut y = x.to_vec();
    if y.len() >= 2 {
        let a = r.gen_range(0..y.len());
        let b = r.gen_range(0..y.len());
        let delta = frac(r.gen_range(1..=4), 2);
        y[a] += &delta;
        y[b] -= &delta;
    }
    y
}

/// Every maximum-weight b-matching, by enumeration (small instances only).
pub fn all_optimal(inst: &Instance) -> Vec<BMatching> {
    assert!(inst.m() <= 16);
    let mut best = Q::from_integer(0.into());
    let mut out = Vec::new();
    for mask in 0u32..1 << inst.m() {
        let m: BMatching = (0..inst.m()).filter(|k| mask >> k & 1 == 1).collect();
        if !is_b_matching(inst, &m) {
            continue;
        }
        let w = weight(inst, &m);
        if w > best {
            best = w;
            out = vec![m];
        } else if w == best {
            out.push(m);
        }
    }
    out
}
