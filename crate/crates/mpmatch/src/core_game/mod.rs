//! The matching game `v(S) = w(M_S)`: coalition values, core membership and
//! the decomposition of core allocations into payoff matrices.

mod b2;
mod brute;
mod decompose;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{Coalition, Instance};
use crate::matching::{max_weight_b_matching, BMatching};
use crate::rational::Q;

pub use b2::{core_membership_b2, max_ratio_cycle, RatioCycle};
pub use brute::{core_membership_bruteforce, core_membership_bruteforce_with, BruteForceOptions, CORE_BRUTE_FORCE_BOUND};
pub use decompose::{allocation_to_payoff, repair_negative, solve_payoff_system, RepairStats, SignedPayoffMatrix};

/// `v(S)`: the maximum weight of a b-matching of `G[S]`.
pub fn game_value(inst: &Instance, s: &Coalition) -> Q {
    game_value_with_witness(inst, s).0
}

/// `v(S)` with an optimal b-matching of `G[S]`, as edges of `inst`.
pub fn game_value_with_witness(inst: &Instance, s: &Coalition) -> (Q, BMatching) {
    let (sub, _, edge_map) = inst.induced_with_map(s);
    let (m, w) = max_weight_b_matching(&sub);
    (w, m.iter().map(|k| edge_map[k]).collect())
}

fn check_allocation_len(inst: &Instance, x: &[Q]) -> Result<()> {
    if x.len() != inst.n() {
        return Err(Error::Precondition(format!("allocation has {} entries for {} players", x.len(), inst.n())));
    }
    Ok(())
}

/// `x(N) = v(N)`.
pub fn is_allocation(inst: &Instance, x: &[Q]) -> Result<bool> {
    check_allocation_len(inst, x)?;
    Ok(x.iter().sum::<Q>() == max_weight_b_matching(inst).1)
}

/// A coalition `S` with `x(S) < v(S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreViolation {
    pub coalition: Coalition,
    pub x_s: Q,
    pub v_s: Q,
    /// `v(S) - x(S) > 0`.
    pub deficit: Q,
    /// An optimal b-matching of `G[S]`.
    pub witness: BMatching,
}

impl CoreViolation {
    /// Recomputes `v(S)`; `None` unless `x(S) < v(S)`.
    pub fn certify(inst: &Instance, x: &[Q], coalition: Coalition) -> Option<CoreViolation> {
        let x_s = coalition.sum(x);
        let (v_s, witness) = game_value_with_witness(inst, &coalition);
        (x_s < v_s).then(|| CoreViolation { deficit: &v_s - &x_s, coalition, x_s, v_s, witness })
    }
}

/// Core membership of an allocation candidate.
///
/// A violated coalition takes precedence; otherwise `x(N) > v(N)` makes the
/// vector a non-allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreVerdict {
    InCore,
    NotAllocation { x_n: Q, v_n: Q },
    Violation(CoreViolation),
}

impl CoreVerdict {
    pub fn is_in_core(&self) -> bool {
        matches!(self, CoreVerdict::InCore)
    }

    pub fn violation(&self) -> Option<&CoreViolation> {
        match self {
            CoreVerdict::Violation(v) => Some(v),
            _ => None,
        }
    }

    /// Same variant, ignoring certificates.
    pub fn same_kind(&self, other: &CoreVerdict) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    pub fn label(&self) -> &'static str {
        match self {
            CoreVerdict::InCore => "in_core",
            CoreVerdict::NotAllocation { .. } => "not_allocation",
            CoreVerdict::Violation(_) => "violation",
        }
    }
}

/// Shared tail of both membership tests once no coalition is violated.
fn allocation_verdict(inst: &Instance, x: &[Q]) -> CoreVerdict {
    let x_n: Q = x.iter().sum();
    let v_n = max_weight_b_matching(inst).1;
    if x_n < v_n {
        let all = Coalition::all(inst);
        return CoreVerdict::Violation(CoreViolation::certify(inst, x, all).expect("x(N) < v(N)"));
    }
    if x_n > v_n {
        return CoreVerdict::NotAllocation { x_n, v_n };
    }
    CoreVerdict::InCore
}

fn nonnegative_or_violation(inst: &Instance, x: &[Q]) -> Option<CoreVerdict> {
    let i = x.iter().position(|q| *q < Q::zero())?;
    let v = CoreViolation::certify(inst, x, Coalition::new(vec![i])).expect("negative singleton");
    Some(CoreVerdict::Violation(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{cubic_gadget, diamond, example3, example4, single_edge, triangle};
    use crate::rational::{frac, int};
    use crate::stability::total_payoff;

    #[test]
    fn values() {
        for alpha in 2..=3u32 {
            let (inst, _) = example4(alpha).unwrap();
            assert_eq!(game_value(&inst, &Coalition::all(&inst)), int(3 * alpha as i64 - 2));
        }
        let (inst, _) = example4(2).unwrap();
        assert_eq!(game_value(&inst, &Coalition::new(vec![0])), int(0));
        let s = Coalition::from_ids(&inst, &["s1", "s2", "t1_1", "t2_1"]).unwrap();
        assert_eq!(game_value(&inst, &s), int(3));
        assert_eq!(game_value(&inst, &Coalition::default()), int(0));
    }

    #[test]
    fn allocations() {
        let g = single_edge(int(1), 3, 3);
        let (gadget, x) = cubic_gadget(&g).unwrap();
        assert!(is_allocation(&gadget, &x).unwrap());
        assert!(!is_allocation(&triangle(), &[int(0), int(0), int(0)]).unwrap());
        let (inst, sol) = fixtures::example3_solution();
        assert!(is_allocation(&inst, &total_payoff(&inst, &sol.payoffs)).unwrap());
        assert!(is_allocation(&inst, &[int(0)]).is_err());
        assert!(is_allocation(&example3(), &[int(1), int(1), int(1), int(1)]).unwrap());
    }

    #[test]
    fn certify_rejects_satisfied_coalitions() {
        let d = diamond();
        let x = vec![int(1), int(1), int(1), int(0)];
        assert!(CoreViolation::certify(&d, &x, Coalition::all(&d)).is_none());
        let v = CoreViolation::certify(&d, &[frac(1, 4), frac(1, 4), int(1), int(1)], Coalition::new(vec![0, 1])).unwrap();
        assert_eq!((v.x_s, v.v_s, v.deficit), (frac(1, 2), int(1), frac(1, 2)));
    }
}
