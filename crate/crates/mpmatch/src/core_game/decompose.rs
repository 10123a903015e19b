//! Writing an allocation as row sums of a payoff matrix on a fixed
//! b-matching `M*`, then pushing negative entries away along cycles.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{Coalition, Instance};
use crate::matching::{require_b_matching, BMatching};
use crate::rational::{frac, Q};
use crate::stability::{total_payoff, PayoffMatrix};

use super::{check_allocation_len, CoreViolation};

/// Payoffs supported on `M*` whose entries may be negative.
pub type SignedPayoffMatrix = PayoffMatrix;

/// Counters of a [`repair_negative`] run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairStats {
    pub augmentations: usize,
    pub initial_negative: usize,
    pub initial_positive: usize,
}

fn components(inst: &Instance, m: &BMatching) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; inst.n()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in 0..inst.n() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![s];
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(u, k) in inst.adj(v) {
                if m.contains(k) && comp[u] == usize::MAX {
                    comp[u] = id;
                    members.push(u);
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Whether `a` and `b` stay connected in `live` without edge `skip`.
fn connected_without(inst: &Instance, live: &[bool], skip: usize, a: usize, b: usize) -> bool {
    let mut seen = vec![false; inst.n()];
    seen[a] = true;
    let mut stack = vec![a];
    while let Some(v) = stack.pop() {
        if v == b {
            return true;
        }
        for &(u, k) in inst.adj(v) {
            if live[k] && k != skip && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    false
}

/// Signed payoffs on `M*` with row sums exactly `x`.
///
/// Edges lying on a cycle are split evenly (lowest index first) until `M*`
/// is a forest; leaves are then peeled, lowest index first, each leaf taking
/// its remaining value on its only edge.
pub fn solve_payoff_system(inst: &Instance, m: &BMatching, x: &[Q]) -> Result<SignedPayoffMatrix> {
    check_allocation_len(inst, x)?;
    require_b_matching(inst, m)?;
    for comp in components(inst, m) {
        let x_c: Q = comp.iter().map(|&i| &x[i]).sum();
        let w_c: Q = m.iter().filter(|&k| comp.contains(&inst.edge(k).u)).map(|k| &inst.edge(k).w).sum();
        if x_c != w_c {
            let ids: Vec<&str> = comp.iter().map(|&i| inst.id(i)).collect();
            return Err(Error::Precondition(format!(
                "allocation sums to {x_c} on the component {{{}}} of weight {w_c}",
                ids.join(",")
            )));
        }
    }
    let mut live: Vec<bool> = (0..inst.m()).map(|k| m.contains(k)).collect();
    let mut rest = x.to_vec();
    let mut p = PayoffMatrix::zeros(inst);
    let half = frac(1, 2);
    for k in m.iter() {
        let e = inst.edge(k);
        if connected_without(inst, &live, k, e.u, e.v) {
            let share = &e.w * &half;
            rest[e.u] -= &share;
            rest[e.v] -= &share;
            *p.pair_mut(k) = [share.clone(), share];
            live[k] = false;
        }
    }
    let mut degree = vec![0usize; inst.n()];
    for (k, e) in inst.edges().iter().enumerate() {
        if live[k] {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
    }
    while let Some(leaf) = (0..inst.n()).find(|&i| degree[i] == 1) {
        let &(j, k) = inst.adj(leaf).iter().find(|&&(_, k)| live[k]).expect("leaf has an edge");
        let w = &inst.edge(k).w;
        let mine = rest[leaf].clone();
        let theirs = w - &mine;
        rest[j] -= &theirs;
        rest[leaf] = Q::zero();
        p.set(inst, k, leaf, mine);
        p.set(inst, k, j, theirs);
        live[k] = false;
        degree[leaf] -= 1;
        degree[j] -= 1;
    }
    debug_assert!(rest.iter().all(Q::is_zero));
    Ok(p)
}

/// Removes negative entries while keeping row sums, by augmenting along
/// cycles of the arc set `{u -> v : uv in M*, p(v, u) > 0}`. Returns the
/// coalition `N \ reach(j)` as a violation when some negative `p(i, j)` has
/// no path back from `j` to `i`.
pub fn repair_negative(
    inst: &Instance,
    m: &BMatching,
    p: &SignedPayoffMatrix,
    x: &[Q],
) -> Result<(PayoffMatrix, RepairStats)> {
    check_allocation_len(inst, x)?;
    let mut p = p.clone();
    let mut stats = RepairStats {
        initial_negative: p.negative_entries(),
        initial_positive: m.iter().flat_map(|k| p.pair(k).iter()).filter(|q| q.is_positive()).count(),
        ..RepairStats::default()
    };
    loop {
        let neg = m.iter().find_map(|k| {
            let e = inst.edge(k);
            let [a, b] = p.pair(k);
            if a.is_negative() {
                Some((e.u, e.v, k))
            } else if b.is_negative() {
                Some((e.v, e.u, k))
            } else {
                None
            }
        });
        let Some((i, j, k_ij)) = neg else { break };
        // BFS from j along arcs u -> v with p(v, u) > 0.
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; inst.n()];
        let mut seen = vec![false; inst.n()];
        seen[j] = true;
        let mut queue = VecDeque::from([j]);
        while let Some(u) = queue.pop_front() {
            if u == i {
                break;
            }
            for &(v, k) in inst.adj(u) {
                if m.contains(k) && !seen[v] && p.get(inst, k, v).is_positive() {
                    seen[v] = true;
                    pred[v] = Some((u, k));
                    queue.push_back(v);
                }
            }
        }
        if !seen[i] {
            let outside = Coalition::new((0..inst.n()).filter(|&v| !seen[v]).collect());
            let violation = CoreViolation::certify(inst, x, outside).expect("cut coalition is violated");
            return Err(Error::NotInCore(Box::new(violation)));
        }
        let mut arcs = vec![(i, j, k_ij)];
        let mut v = i;
        while let Some((u, k)) = pred[v] {
            arcs.push((u, v, k));
            v = u;
        }
        let eps = arcs.iter().map(|&(_, v, k)| p.get(inst, k, v).clone()).min().expect("nonempty cycle");
        for &(u, v, k) in &arcs {
            let up = p.get(inst, k, u) + &eps;
            let down = p.get(inst, k, v) - &eps;
            p.set(inst, k, u, up);
            p.set(inst, k, v, down);
        }
        stats.augmentations += 1;
    }
    Ok((p, stats))
}

/// A nonnegative payoff matrix compatible with `M*` whose row sums are `x`.
pub fn allocation_to_payoff(inst: &Instance, x: &[Q], m: &BMatching) -> Result<PayoffMatrix> {
    let signed = solve_payoff_system(inst, m, x)?;
    let (p, _) = repair_negative(inst, m, &signed, x)?;
    debug_assert_eq!(total_payoff(inst, &p), x);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::two_player;
    use crate::matching::max_weight_b_matching;
    use crate::rational::int;
    use crate::stability::{is_compatible, Solution};

    fn path() -> Instance {
        Instance::build(&[("a", 1), ("b", 2), ("c", 1)], &[("a", "b", int(1)), ("b", "c", int(1))]).unwrap()
    }

    fn all(inst: &Instance) -> BMatching {
        (0..inst.m()).collect()
    }

    #[test]
    fn single_edge_forced() {
        let inst = two_player(int(7));
        let p = solve_payoff_system(&inst, &all(&inst), &[int(3), int(4)]).unwrap();
        assert_eq!(p.pair(0), &[int(3), int(4)]);
    }

    #[test]
    fn path_peeling_and_repair() {
        let inst = path();
        let m = all(&inst);
        let x = [int(2), int(0), int(0)];
        let p = solve_payoff_system(&inst, &m, &x).unwrap();
        assert_eq!(p.pair(0), &[int(2), int(-1)]);
        assert_eq!(p.pair(1), &[int(1), int(0)]);
        let err = repair_negative(&inst, &m, &p, &x).unwrap_err();
        let Error::NotInCore(v) = err else { panic!("expected a violation") };
        assert_eq!(v.coalition.ids(&inst), ["b", "c"]);
        assert_eq!((v.x_s.clone(), v.v_s.clone()), (int(0), int(1)));

        let core = [int(1), int(0), int(1)];
        let (fixed, stats) = repair_negative(&inst, &m, &solve_payoff_system(&inst, &m, &core).unwrap(), &core).unwrap();
        assert!(fixed.is_nonnegative());
        assert_eq!(total_payoff(&inst, &fixed), core);
        assert_eq!(stats.augmentations, 0);
    }

    #[test]
    fn repair_augments_once() {
        // Star centre b with leaves a and c, plus edge a-c, all in M*.
        let inst = Instance::build(
            &[("a", 2), ("b", 2), ("c", 2)],
            &[("a", "b", int(2)), ("b", "c", int(2)), ("a", "c", int(2))],
        )
        .unwrap();
        let m = all(&inst);
        let x = [int(2), int(2), int(2)];
        let mut p = PayoffMatrix::zeros(&inst);
        *p.pair_mut(0) = [int(3), int(-1)];
        *p.pair_mut(1) = [int(3), int(-1)];
        *p.pair_mut(2) = [int(-1), int(3)];
        assert_eq!(total_payoff(&inst, &p), x);
        let (fixed, stats) = repair_negative(&inst, &m, &p, &x).unwrap();
        assert!(fixed.is_nonnegative());
        assert_eq!(total_payoff(&inst, &fixed), x);
        assert_eq!(stats.augmentations, 1);
        assert!(stats.augmentations <= stats.initial_positive);
    }

    #[test]
    fn four_cycle_halves_first_edge() {
        let inst = Instance::build(
            &[("a", 2), ("b", 2), ("c", 2), ("d", 2)],
            &[("a", "b", int(1)), ("b", "c", int(1)), ("c", "d", int(1)), ("d", "a", int(1))],
        )
        .unwrap();
        let x = vec![int(1); 4];
        let p = solve_payoff_system(&inst, &all(&inst), &x).unwrap();
        assert_eq!(p.pair(0), &[frac(1, 2), frac(1, 2)]);
        assert_eq!(total_payoff(&inst, &p), x);
    }

    #[test]
    fn component_sums_checked() {
        let inst = path();
        assert!(matches!(
            solve_payoff_system(&inst, &all(&inst), &[int(1), int(1), int(1)]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn diamond_cyclic_payoffs() {
        let (inst, x, expected) = fixtures::diamond_core_payoff();
        let (m, _) = max_weight_b_matching(&inst);
        assert_eq!(m, expected.matching);
        let p = allocation_to_payoff(&inst, &x, &m).unwrap();
        assert_eq!(total_payoff(&inst, &p), x);
        assert!(is_compatible(&inst, &Solution::new(m, p.clone())));
        // Cycle halving gives the even split; the cyclic payoffs share its row sums.
        assert!((0..3).all(|k| p.pair(k) == &[frac(1, 2), frac(1, 2)]));
        assert_eq!(total_payoff(&inst, &expected.payoffs), x);
    }

    #[test]
    fn example3_round_trip() {
        let (inst, sol) = fixtures::example3_solution();
        let x = total_payoff(&inst, &sol.payoffs);
        let p = allocation_to_payoff(&inst, &x, &sol.matching).unwrap();
        assert_eq!(total_payoff(&inst, &p), x);
        assert!(is_compatible(&inst, &Solution::new(sol.matching.clone(), p)));
    }

    #[test]
    fn nonnegative_untouched() {
        let (inst, sol) = fixtures::example3_solution();
        let x = total_payoff(&inst, &sol.payoffs);
        let (p, stats) = repair_negative(&inst, &sol.matching, &sol.payoffs, &x).unwrap();
        assert_eq!((p, stats.augmentations), (sol.payoffs, 0));
    }
}
