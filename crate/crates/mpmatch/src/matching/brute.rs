//! Exhaustive b-matching oracle.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::Q;

use super::BMatching;

/// Default edge bound for [`max_weight_b_matching_bruteforce`].
pub const BRUTE_FORCE_EDGE_BOUND: usize = 22;

/// Tie rule among equal-weight b-matchings: compare sorted edge lists
/// position by position, a missing position counting as `+inf`; the smaller
/// list is preferred.
pub fn lex_preferred(a: &[usize], b: &[usize]) -> bool {
    for i in 0..a.len().max(b.len()) {
        let x = a.get(i).copied().unwrap_or(usize::MAX);
        let y = b.get(i).copied().unwrap_or(usize::MAX);
        match x.cmp(&y) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    false
}

pub fn max_weight_b_matching_bruteforce(inst: &Instance) -> Result<(BMatching, Q)> {
    max_weight_b_matching_bruteforce_with_bound(inst, BRUTE_FORCE_EDGE_BOUND)
}

/// Enumerates every edge subset that respects the capacities.
pub fn max_weight_b_matching_bruteforce_with_bound(inst: &Instance, bound: usize) -> Result<(BMatching, Q)> {
    if inst.m() > bound {
        return Err(Error::BoundExceeded { what: "edge count", found: inst.m(), bound });
    }
    let mut search = Search {
        inst,
        load: vec![0; inst.n()],
        current: Vec::new(),
        weight: Q::zero(),
        best: Vec::new(),
        best_weight: Q::zero(),
    };
    search.go(0);
    let w = search.best_weight.clone();
    Ok((search.best.into_iter().collect(), w))
}

struct Search<'a> {
    inst: &'a Instance,
    load: Vec<u32>,
    current: Vec<usize>,
    weight: Q,
    best: Vec<usize>,
    best_weight: Q,
}

impl Search<'_> {
    fn go(&mut self, k: usize) {
        if k == self.inst.m() {
            let better = match self.weight.cmp(&self.best_weight) {
                Ordering::Greater => true,
                Ordering::Equal => lex_preferred(&self.current, &self.best),
                Ordering::Less => false,
            };
            if better {
                self.best = self.current.clone();
                self.best_weight = self.weight.clone();
            }
            return;
        }
        let e = self.inst.edge(k);
        let (u, v) = (e.u, e.v);
        if self.load[u] < self.inst.capacity(u) && self.load[v] < self.inst.capacity(v) {
            self.load[u] += 1;
            self.load[v] += 1;
            self.current.push(k);
            self.weight += &e.w;
            self.go(k + 1);
            self.weight -= &self.inst.edge(k).w;
            self.current.pop();
            self.load[u] -= 1;
            self.load[v] -= 1;
        }
        self.go(k + 1);
    }
}
