//! Core membership by enumerating coalitions.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{Coalition, Instance};
use crate::matching::max_weight_b_matching;
use crate::rational::{common_denominator, Q};

use super::{allocation_verdict, check_allocation_len, CoreVerdict, CoreViolation};

/// Default bound on the number of enumerated players.
pub const CORE_BRUTE_FORCE_BOUND: usize = 16;

/// Above this many edges coalition values come from the matching engine
/// instead of b-matching enumeration.
const ENUMERATION_EDGE_LIMIT: usize = 20;

#[derive(Debug, Clone)]
pub struct BruteForceOptions {
    pub bound: usize,
    /// Enumerate only subsets of this set (all players when `None`).
    pub ground: Option<Coalition>,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions { bound: CORE_BRUTE_FORCE_BOUND, ground: None }
    }
}

pub fn core_membership_bruteforce(inst: &Instance, x: &[Q]) -> Result<CoreVerdict> {
    core_membership_bruteforce_with(inst, x, &BruteForceOptions::default())
}

/// Checks `x(S) >= v(S)` for every nonempty `S` inside the ground set and
/// reports the coalition of largest deficit (smallest bit mask on ties).
/// Without violations the verdict compares `x(N)` with `v(N)`.
pub fn core_membership_bruteforce_with(inst: &Instance, x: &[Q], opts: &BruteForceOptions) -> Result<CoreVerdict> {
    check_allocation_len(inst, x)?;
    let ground = opts.ground.clone().unwrap_or_else(|| Coalition::all(inst));
    if ground.len() > opts.bound {
        return Err(Error::BoundExceeded { what: "coalition ground set", found: ground.len(), bound: opts.bound });
    }
    let (sub, map, _) = inst.induced_with_map(&ground);
    let xs: Vec<Q> = map.iter().map(|&i| x[i].clone()).collect();
    let values = coalition_values(&sub);
    let g = sub.n();
    let mut x_of = vec![Q::zero(); 1 << g];
    let mut best: Option<(Q, usize)> = None;
    for mask in 1usize..1 << g {
        let low = mask.trailing_zeros() as usize;
        x_of[mask] = &x_of[mask & (mask - 1)] + &xs[low];
        let deficit = &values[mask] - &x_of[mask];
        if deficit > Q::zero() && best.as_ref().is_none_or(|(d, _)| deficit > *d) {
            best = Some((deficit, mask));
        }
    }
    if let Some((_, mask)) = best {
        let members = (0..g).filter(|t| mask >> t & 1 == 1).map(|t| map[t]).collect();
        let v = CoreViolation::certify(inst, x, Coalition::new(members)).expect("enumerated violation");
        return Ok(CoreVerdict::Violation(v));
    }
    Ok(allocation_verdict(inst, x))
}

/// `v(S)` for every subset mask of the players of `inst`.
fn coalition_values(inst: &Instance) -> Vec<Q> {
    let g = inst.n();
    if inst.m() <= ENUMERATION_EDGE_LIMIT {
        if let Some(v) = enumerated_values(inst) {
            return v;
        }
    }
    (0..1usize << g)
        .into_par_iter()
        .map(|mask| max_weight_b_matching(&inst.induced(&Coalition::from_mask(mask as u64))).1)
        .collect()
}

/// Best weight per exact covered set over all b-matchings, then a subset
/// maximum transform. `None` when scaled weights overflow `i64`.
fn enumerated_values(inst: &Instance) -> Option<Vec<Q>> {
    let g = inst.n();
    let denom = common_denominator(inst.edges().iter().map(|e| &e.w));
    let w: Vec<i64> = inst
        .edges()
        .iter()
        .map(|e| (e.w.numer() * &denom / e.w.denom()).to_i64())
        .collect::<Option<_>>()?;
    if w.iter().map(|&v| v as i128).sum::<i128>() > i64::MAX as i128 {
        return None;
    }
    let ends: Vec<(usize, usize)> = inst.edges().iter().map(|e| (e.u, e.v)).collect();
    let mut best = vec![0i64; 1 << g];
    let mut load = vec![0u32; g];
    let cap = inst.capacities().to_vec();
    fn go(k: usize, ends: &[(usize, usize)], w: &[i64], cap: &[u32], load: &mut [u32], cover: usize, acc: i64, best: &mut [i64]) {
        if k == ends.len() {
            if acc > best[cover] {
                best[cover] = acc;
            }
            return;
        }
        go(k + 1, ends, w, cap, load, cover, acc, best);
        let (u, v) = ends[k];
        if load[u] < cap[u] && load[v] < cap[v] {
            load[u] += 1;
            load[v] += 1;
            go(k + 1, ends, w, cap, load, cover | 1 << u | 1 << v, acc + w[k], best);
            load[u] -= 1;
            load[v] -= 1;
        }
    }
    go(0, &ends, &w, &cap, &mut load, 0, 0, &mut best);
    for bit in 0..g {
        for mask in 0..1usize << g {
            if mask >> bit & 1 == 1 {
                best[mask] = best[mask].max(best[mask ^ 1 << bit]);
            }
        }
    }
    let d = denom;
    Some(best.into_iter().map(|v| Q::new(BigInt::from(v), d.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_game::game_value;
    use crate::fixtures;
    use crate::instance::{example2, triangle};
    use crate::rational::{frac, int};

    #[test]
    fn triangle_core_is_empty() {
        for x in [[frac(1, 3), frac(1, 3), frac(1, 3)], [int(1), int(0), int(0)], [frac(1, 2), frac(1, 2), int(0)]] {
            assert!(core_membership_bruteforce(&triangle(), &x).unwrap().violation().is_some());
        }
    }

    #[test]
    fn diamond_in_core() {
        let (inst, x, _) = fixtures::diamond_core_payoff();
        assert_eq!(core_membership_bruteforce(&inst, &x).unwrap(), CoreVerdict::InCore);
    }

    #[test]
    fn enumerated_values_match_engine() {
        let inst = example2();
        let values = enumerated_values(&inst).unwrap();
        for mask in 0..1usize << inst.n() {
            assert_eq!(values[mask], game_value(&inst, &Coalition::from_mask(mask as u64)), "mask {mask}");
        }
    }

    #[test]
    fn bound_and_ground() {
        let inst = triangle();
        let opts = BruteForceOptions { bound: 2, ground: None };
        assert!(matches!(
            core_membership_bruteforce_with(&inst, &vec![int(0); 3], &opts),
            Err(Error::BoundExceeded { .. })
        ));
        let x = [int(1), int(0), int(0)];
        let opts = BruteForceOptions { bound: 2, ground: Some(Coalition::new(vec![1, 2])) };
        let v = core_membership_bruteforce_with(&inst, &x, &opts).unwrap();
        assert_eq!(v.violation().unwrap().coalition.members(), &[1, 2]);
    }

    #[test]
    fn non_allocation() {
        let v = core_membership_bruteforce(&triangle(), &[int(1), int(1), int(1)]).unwrap();
        assert_eq!(v, CoreVerdict::NotAllocation { x_n: int(3), v_n: int(1) });
    }
}
