mod common;

use mpmatch::core_game::core_membership_bruteforce;
use mpmatch::matching::{max_half_b_matching_weight, max_weight_b_matching_bruteforce, weight};
use mpmatch::solver::{
    dual_from_stable, dual_objective, has_stable_solution, is_dual_feasible, solve, stable_from_dual,
    verify_complementary_slackness, SolveOutcome, SplitRule,
};
use mpmatch::stability::{is_stable, resolve_sellers, total_payoff};

#[test]
fn pipeline_on_random_instances() {
    let mut r = common::rng(21);
    let p = common::params(7, 3, 4);
    let (mut stable, mut none) = (0, 0);
    for round in 0..250 {
        let inst = common::general(&mut r, &p);
        let (half, _) = max_half_b_matching_weight(&inst);
        let (_, integral) = max_weight_b_matching_bruteforce(&inst).unwrap();
        let outcome = solve(&inst);
        assert_eq!(outcome.is_stable(), half == integral, "round {round}");
        assert_eq!(outcome.is_stable(), has_stable_solution(&inst));
        match outcome {
            SolveOutcome::Stable { solution, dual, weight: w } => {
                stable += 1;
                assert_eq!(w, integral);
                assert_eq!(weight(&inst, &solution.matching), integral);
                assert!(is_stable(&inst, &solution).unwrap().is_stable());
                assert!(is_dual_feasible(&inst, &dual).unwrap().is_feasible());
                assert_eq!(dual_objective(&inst, &dual).unwrap(), integral);
                assert!(verify_complementary_slackness(&inst, &solution.matching, &dual).unwrap().is_clean());
                let x = total_payoff(&inst, &solution.payoffs);
                assert!(core_membership_bruteforce(&inst, &x).unwrap().is_in_core(), "round {round}");
                let back = dual_from_stable(&inst, &solution).unwrap();
                let again = stable_from_dual(&inst, &solution.matching, &back, &SplitRule::Half).unwrap();
                assert!(is_stable(&inst, &again).unwrap().is_stable());
            }
            SolveOutcome::NoStable { witness, half_weight, integral_weight } => {
                none += 1;
                assert!(half_weight > integral_weight);
                assert_eq!(witness.weight(&inst), half_weight);
                assert!(witness.is_feasible(&inst));
            }
        }
    }
    assert!(stable > 0 && none > 0, "both outcomes should occur ({stable}, {none})");
}

#[test]
fn buyer_side_split_is_stable() {
    let mut r = common::rng(22);
    let p = common::params(8, 3, 5);
    for _ in 0..100 {
        let inst = common::bipartite(&mut r, &p);
        let sellers: Vec<usize> = (0..inst.n()).step_by(2).collect();
        let is_seller = resolve_sellers(&inst, Some(&sellers)).unwrap();
        let SolveOutcome::Stable { solution, dual, .. } = solve(&inst) else { panic!("bipartite instances are solvable") };
        let sol = stable_from_dual(&inst, &solution.matching, &dual, &SplitRule::BuyerSide(is_seller)).unwrap();
        assert!(is_stable(&inst, &sol).unwrap().is_stable());
    }
}
