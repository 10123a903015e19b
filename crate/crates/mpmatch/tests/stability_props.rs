mod common;

use mpmatch::solver::{solve, stable_from_dual, SolveOutcome, SplitRule};
use mpmatch::stability::{
    are_equivalent, is_stable, meet_join, rematch, resolve_sellers, to_competitive_equilibrium, utilities,
    LatticeOp,
};
use num_traits::Signed;

#[test]
fn rematch_onto_every_optimum() {
    let mut r = common::rng(41);
    let mut p = common::params(7, 2, 2);
    p.max_edges = Some(12);
    let mut moves = 0;
    for _ in 0..200 {
        let inst = common::general(&mut r, &p);
        let SolveOutcome::Stable { solution, .. } = solve(&inst) else { continue };
        for m_hat in common::all_optimal(&inst) {
            let moved = rematch(&inst, &solution, &m_hat).unwrap();
            assert_eq!(moved.matching, m_hat);
            assert!(is_stable(&inst, &moved).unwrap().is_stable());
            assert!(are_equivalent(&inst, &solution, &moved).unwrap());
            moves += 1;
        }
    }
    assert!(moves > 200);
}

#[test]
fn lattice_and_equilibrium_on_bipartite() {
    let mut r = common::rng(42);
    let p = common::params(8, 3, 4);
    for _ in 0..150 {
        let inst = common::bipartite(&mut r, &p);
        let color = inst.two_coloring().unwrap();
        let sellers: Vec<usize> = (0..inst.n()).filter(|&i| color[i] == 0).collect();
        let is_seller = resolve_sellers(&inst, Some(&sellers)).unwrap();
        let SolveOutcome::Stable { solution, dual, .. } = solve(&inst) else { panic!("bipartite") };
        let a = stable_from_dual(&inst, &solution.matching, &dual, &SplitRule::BuyerSide(is_seller.clone())).unwrap();
        let buyers: Vec<bool> = is_seller.iter().map(|s| !s).collect();
        let b = stable_from_dual(&inst, &solution.matching, &dual, &SplitRule::BuyerSide(buyers)).unwrap();
        let (ua, ub) = (utilities(&inst, &a).unwrap(), utilities(&inst, &b).unwrap());
        for op in [LatticeOp::Join, LatticeOp::Meet] {
            let c = meet_join(&inst, &a, &b, op, &is_seller).unwrap();
            assert!(is_stable(&inst, &c).unwrap().is_stable());
            let uc = utilities(&inst, &c).unwrap();
            for i in 0..inst.n() {
                let (lo, hi) = if ua[i] <= ub[i] { (&ua[i], &ub[i]) } else { (&ub[i], &ua[i]) };
                assert!(lo <= &uc[i] && &uc[i] <= hi);
            }
        }
        let ce = to_competitive_equilibrium(&inst, &a, &is_seller).unwrap();
        assert!(is_stable(&inst, &ce).unwrap().is_stable());
        let u = utilities(&inst, &ce).unwrap();
        for k in ce.matching.iter() {
            let e = inst.edge(k);
            let s = if is_seller[e.u] { e.u } else { e.v };
            assert_eq!(ce.payoffs.get(&inst, k, s), &u[s]);
        }
        assert!(u.iter().all(|q| !q.is_negative()));
    }
}
