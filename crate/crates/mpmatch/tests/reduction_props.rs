mod common;

use mpmatch::matching::{is_b_matching, max_weight_b_matching, weight, BMatching};
use mpmatch::reduction::{lift_stable, reduce_matching, reduce_solution, srp_is_stable, ReducedInstance};
use mpmatch::solver::{solve, SolveOutcome};
use mpmatch::stability::{is_stable, utilities};
use mpmatch::Instance;
use proptest::prelude::*;

fn instance(seed: u64, bipartite: bool) -> Instance {
    let mut r = common::rng(seed);
    let mut p = common::params(6, 3, 4);
    p.max_edges = Some(9);
    if bipartite {
        common::bipartite(&mut r, &p)
    } else {
        common::general(&mut r, &p)
    }
}

/// Greedy b-matching over the edges selected by `mask`.
fn masked_matching(inst: &Instance, mask: u64) -> BMatching {
    let mut deg = vec![0u32; inst.n()];
    let mut m = BMatching::new();
    for (k, e) in inst.edges().iter().enumerate() {
        if mask >> k & 1 == 1 && deg[e.u] < inst.capacity(e.u) && deg[e.v] < inst.capacity(e.v) {
            deg[e.u] += 1;
            deg[e.v] += 1;
            m.insert(k);
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn sizes_follow_the_gadget(seed in any::<u64>(), bip in any::<bool>()) {
        let inst = instance(seed, bip);
        let r = ReducedInstance::new(&inst);
        let b: usize = inst.capacities().iter().map(|&c| c as usize).sum();
        prop_assert_eq!(r.instance.n(), b + 4 * inst.m());
        let m: usize = inst.edges().iter().map(|e| (inst.capacity(e.u) + inst.capacity(e.v)) as usize + 3).sum();
        prop_assert_eq!(r.instance.m(), m);
        prop_assert!(r.instance.capacities().iter().all(|&c| c == 1));
    }

    #[test]
    fn weight_identity(seed in any::<u64>(), mask in any::<u64>()) {
        let inst = instance(seed, false);
        let r = ReducedInstance::new(&inst);
        let m = masked_matching(&inst, mask);
        let mr = reduce_matching(&inst, &r, &m);
        prop_assert!(is_b_matching(&r.instance, &mr));
        let total = inst.total_weight();
        prop_assert_eq!(weight(&r.instance, &mr), weight(&inst, &m) + &total + &total);
    }

    #[test]
    fn optimum_shifts_by_twice_total_weight(seed in any::<u64>()) {
        let inst = instance(seed, false);
        let r = ReducedInstance::new(&inst);
        let total = inst.total_weight();
        prop_assert_eq!(max_weight_b_matching(&r.instance).1, max_weight_b_matching(&inst).1 + &total + &total);
    }

    #[test]
    fn reduce_then_lift(seed in any::<u64>(), bip in any::<bool>()) {
        let inst = instance(seed, bip);
        let SolveOutcome::Stable { solution, .. } = solve(&inst) else { return Ok(()) };
        let r = ReducedInstance::new(&inst);
        let srp = reduce_solution(&inst, &r, &solution).unwrap();
        prop_assert!(srp_is_stable(&r.instance, &srp).unwrap().is_stable());
        let lifted = lift_stable(&inst, &r, &srp).unwrap();
        prop_assert!(is_stable(&inst, &lifted).unwrap().is_stable());
        prop_assert_eq!(utilities(&inst, &lifted).unwrap(), utilities(&inst, &solution).unwrap());
    }
}
