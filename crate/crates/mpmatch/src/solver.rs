//! LP objectives and duals, the half-b-matching existence test, and the
//! end-to-end stable solution pipeline.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matching::{
    bipartite_max_weight_b_matching_with_duals, duplicated_instance, half_from_duplicated, is_b_matching,
    max_half_b_matching_weight, max_weight_b_matching, weight, BMatching, HalfBMatching,
};
use crate::rational::{frac, pos, Q};
use crate::stability::{require_stable, utilities, PayoffMatrix, Solution};

/// A solution `(y, d)` of the dual LP
/// `min sum b(i) y(i) + sum d(ij)` s.t. `y(i) + y(j) + d(ij) >= w(ij)`, `y, d >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    pub y: Vec<Q>,
    pub d: Vec<Q>,
}

fn capacity_q(inst: &Instance, i: usize) -> Q {
    Q::from_integer(inst.capacity(i).into())
}

fn check_len(what: &str, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::Precondition(format!("{what} has {found} entries, expected {expected}")));
    }
    Ok(())
}

/// `sum w(ij) x(ij)`.
pub fn primal_objective(inst: &Instance, x: &[Q]) -> Result<Q> {
    check_len("primal vector", x.len(), inst.m())?;
    Ok(inst.edges().iter().zip(x).map(|(e, v)| &e.w * v).sum())
}

/// `sum b(i) y(i) + sum d(ij)`.
pub fn dual_objective(inst: &Instance, dual: &DualSolution) -> Result<Q> {
    check_len("y", dual.y.len(), inst.n())?;
    check_len("d", dual.d.len(), inst.m())?;
    let ys: Q = dual.y.iter().enumerate().map(|(i, y)| y * capacity_q(inst, i)).sum();
    Ok(ys + dual.d.iter().sum::<Q>())
}

/// Violations of the dual constraints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DualFeasibility {
    /// Edges with `y(i) + y(j) + d(ij) < w(ij)`.
    pub violated_edges: Vec<usize>,
    pub negative_y: Vec<usize>,
    pub negative_d: Vec<usize>,
}

impl DualFeasibility {
    pub fn is_feasible(&self) -> bool {
        self.violated_edges.is_empty() && self.negative_y.is_empty() && self.negative_d.is_empty()
    }
}

pub fn is_dual_feasible(inst: &Instance, dual: &DualSolution) -> Result<DualFeasibility> {
    check_len("y", dual.y.len(), inst.n())?;
    check_len("d", dual.d.len(), inst.m())?;
    Ok(DualFeasibility {
        violated_edges: inst
            .edges()
            .iter()
            .enumerate()
            .filter(|(k, e)| &dual.y[e.u] + &dual.y[e.v] + &dual.d[*k] < e.w)
            .map(|(k, _)| k)
            .collect(),
        negative_y: (0..inst.n()).filter(|&i| dual.y[i].is_negative()).collect(),
        negative_d: (0..inst.m()).filter(|&k| dual.d[k].is_negative()).collect(),
    })
}

/// `d(ij) = [w(ij) - y(i) - y(j)]_+`.
pub fn tighten_d(inst: &Instance, y: &[Q]) -> Vec<Q> {
    inst.edges().iter().map(|e| pos(&(&e.w - &y[e.u] - &y[e.v]))).collect()
}

/// Dual of the original LP read off the bipartite engine's certificate on
/// the duplicated instance: `y(i) = y^(i') + y^(i'')`, `d(ij) = d^(i'j'') + d^(i''j')`.
/// Its objective equals the maximum weight of a half-b-matching.
pub fn dual_from_duplicated(inst: &Instance) -> DualSolution {
    dual_and_witness(inst).0
}

fn dual_and_witness(inst: &Instance) -> (DualSolution, HalfBMatching, Q) {
    let dup = duplicated_instance(inst);
    let (m_hat, cert) =
        bipartite_max_weight_b_matching_with_duals(&dup.instance).expect("double cover is bipartite");
    let y = (0..inst.n())
        .map(|i| {
            let (a, b) = dup.copies(i);
            &cert.potentials[a] + &cert.potentials[b]
        })
        .collect();
    let d = (0..inst.m())
        .map(|k| {
            let (a, b) = dup.edge_pair(k);
            &cert.slacks[a] + &cert.slacks[b]
        })
        .collect();
    let witness = half_from_duplicated(&dup, inst, &m_hat);
    let half = weight(&dup.instance, &m_hat);
    (DualSolution { y, d }, witness, half)
}

/// True iff the integral and half-integral optima coincide.
pub fn has_stable_solution(inst: &Instance) -> bool {
    let ((_, integral), (half, _)) = rayon::join(|| max_weight_b_matching(inst), || max_half_b_matching_weight(inst));
    integral == half
}

/// How the slack `d(ij)` of a matched edge is split between its ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitRule {
    /// `xi(i, j) = xi(j, i) = d(ij) / 2`.
    Half,
    /// The whole slack goes to the non-seller end; the flag vector marks sellers.
    BuyerSide(Vec<bool>),
}

/// `p(i, j) = y(i) + xi(i, j)` on `M*`, zero elsewhere.
pub fn stable_from_dual(inst: &Instance, m: &BMatching, dual: &DualSolution, rule: &SplitRule) -> Result<Solution> {
    if !is_b_matching(inst, m) {
        return Err(Error::NotBMatching);
    }
    let feas = is_dual_feasible(inst, dual)?;
    if !feas.is_feasible() {
        return Err(Error::DualInfeasible(
            feas.violated_edges.len() + feas.negative_y.len() + feas.negative_d.len(),
        ));
    }
    let (primal, dual_obj) = (weight(inst, m), dual_objective(inst, dual)?);
    if primal != dual_obj {
        return Err(Error::DualityGap { primal: primal.to_string(), dual: dual_obj.to_string() });
    }
    if let SplitRule::BuyerSide(is_seller) = rule {
        check_len("seller flags", is_seller.len(), inst.n())?;
    }
    let mut p = PayoffMatrix::zeros(inst);
    for k in m.iter() {
        let e = inst.edge(k);
        let d = &dual.d[k];
        let (xu, xv) = match rule {
            SplitRule::Half => (d * frac(1, 2), d * frac(1, 2)),
            SplitRule::BuyerSide(is_seller) if is_seller[e.u] => (Q::zero(), d.clone()),
            SplitRule::BuyerSide(_) => (d.clone(), Q::zero()),
        };
        p.pair_mut(k)[0] = &dual.y[e.u] + xu;
        p.pair_mut(k)[1] = &dual.y[e.v] + xv;
    }
    let sol = Solution::new(m.clone(), p);
    require_stable(inst, &sol)?;
    Ok(sol)
}

/// `y(i) = u_p(i)` and `d = tighten_d(y)`; optimal with objective `w(M)`.
pub fn dual_from_stable(inst: &Instance, sol: &Solution) -> Result<DualSolution> {
    require_stable(inst, sol)?;
    let y = utilities(inst, sol)?;
    let d = tighten_d(inst, &y);
    let dual = DualSolution { y, d };
    let (primal, obj) = (weight(inst, &sol.matching), dual_objective(inst, &dual)?);
    if primal != obj {
        return Err(Error::DualityGap { primal: primal.to_string(), dual: obj.to_string() });
    }
    Ok(dual)
}

/// Complementary slackness failures for an integral primal and a dual.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlacknessReport {
    /// Unsaturated players with `y(i) > 0`.
    pub priced_unsaturated: Vec<usize>,
    /// Unmatched edges with `d(ij) > 0`.
    pub slack_unmatched: Vec<usize>,
    /// Matched edges where `y(i) + y(j) + d(ij) > w(ij)`.
    pub loose_matched: Vec<usize>,
}

impl SlacknessReport {
    pub fn is_clean(&self) -> bool {
        self.priced_unsaturated.is_empty() && self.slack_unmatched.is_empty() && self.loose_matched.is_empty()
    }
}

pub fn verify_complementary_slackness(inst: &Instance, m: &BMatching, dual: &DualSolution) -> Result<SlacknessReport> {
    if !is_b_matching(inst, m) {
        return Err(Error::NotBMatching);
    }
    let feas = is_dual_feasible(inst, dual)?;
    if !feas.is_feasible() {
        return Err(Error::DualInfeasible(
            feas.violated_edges.len() + feas.negative_y.len() + feas.negative_d.len(),
        ));
    }
    let deg = m.degrees(inst);
    let mut report = SlacknessReport::default();
    for i in 0..inst.n() {
        if deg[i] < inst.capacity(i) && dual.y[i].is_positive() {
            report.priced_unsaturated.push(i);
        }
    }
    for (k, e) in inst.edges().iter().enumerate() {
        if !m.contains(k) {
            if dual.d[k].is_positive() {
                report.slack_unmatched.push(k);
            }
        } else if &dual.y[e.u] + &dual.y[e.v] + &dual.d[k] != e.w {
            report.loose_matched.push(k);
        }
    }
    Ok(report)
}

/// Result of [`solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Stable { solution: Solution, dual: DualSolution, weight: Q },
    /// The half-b-matching `witness` beats every b-matching.
    NoStable { witness: HalfBMatching, half_weight: Q, integral_weight: Q },
}

impl SolveOutcome {
    pub fn is_stable(&self) -> bool {
        matches!(self, SolveOutcome::Stable { .. })
    }
}

/// Finds a stable solution or certifies that none exists.
pub fn solve(inst: &Instance) -> SolveOutcome {
    let ((m, integral), (dual, witness, half)) =
        rayon::join(|| max_weight_b_matching(inst), || dual_and_witness(inst));
    if integral != half {
        debug_assert!(half > integral);
        return SolveOutcome::NoStable { witness, half_weight: half, integral_weight: integral };
    }
    let solution = stable_from_dual(inst, &m, &dual, &SplitRule::Half).expect("zero gap yields a stable solution");
    SolveOutcome::Stable { solution, dual, weight: integral }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{diamond, example1, example2, example3, example4, single_edge, triangle, two_player};
    use crate::rational::int;
    use crate::stability::{are_equivalent, is_stable, rematch};

    #[test]
    fn objectives() {
        let inst = example3();
        let (_, sol) = fixtures::example3_solution();
        let x: Vec<Q> = (0..inst.m()).map(|k| if sol.matching.contains(k) { int(1) } else { int(0) }).collect();
        assert_eq!(primal_objective(&inst, &x).unwrap(), int(4));
        assert_eq!(primal_objective(&inst, &vec![Q::zero(); inst.m()]).unwrap(), int(0));
        let dual = DualSolution { y: vec![Q::zero(); inst.n()], d: inst.edges().iter().map(|e| e.w.clone()).collect() };
        assert_eq!(dual_objective(&inst, &dual).unwrap(), inst.total_weight());
        assert!(is_dual_feasible(&inst, &dual).unwrap().is_feasible());
        assert!(primal_objective(&inst, &[]).is_err());
    }

    #[test]
    fn infeasible_dual_lists_edges() {
        let inst = example3();
        let dual = DualSolution { y: vec![Q::zero(); inst.n()], d: vec![Q::zero(); inst.m()] };
        assert_eq!(is_dual_feasible(&inst, &dual).unwrap().violated_edges, (0..inst.m()).collect::<Vec<_>>());
    }

    #[test]
    fn tighten_formula() {
        assert_eq!(tighten_d(&two_player(int(7)), &[int(0), int(0)]), vec![int(7)]);
        assert_eq!(tighten_d(&two_player(int(7)), &[int(4), int(4)]), vec![int(0)]);
        let inst = example3();
        let d = tighten_d(&inst, &[frac(3, 2), frac(3, 2), int(0), int(0)]);
        let by = |u: &str, v: &str| d[inst.edge_by_ids(u, v).unwrap()].clone();
        assert_eq!(
            [by("v1", "v2"), by("v2", "v3"), by("v3", "v4"), by("v4", "v1")],
            [int(0), int(0), int(1), int(0)]
        );
    }

    #[test]
    fn duplicated_duals() {
        let single = dual_from_duplicated(&single_edge(int(7), 1, 1));
        assert_eq!(dual_objective(&single_edge(int(7), 1, 1), &single).unwrap(), int(7));
        let d = diamond();
        let dual = dual_from_duplicated(&d);
        assert!(is_dual_feasible(&d, &dual).unwrap().is_feasible());
        assert_eq!(dual_objective(&d, &dual).unwrap(), frac(7, 2));
        let (e4, _) = example4(2).unwrap();
        let dual = dual_from_duplicated(&e4);
        assert_eq!(dual_objective(&e4, &dual).unwrap(), max_half_b_matching_weight(&e4).0);
        let e2 = example2();
        assert!(is_dual_feasible(&e2, &dual_from_duplicated(&e2)).unwrap().is_feasible());
    }

    #[test]
    fn existence() {
        assert!(!has_stable_solution(&diamond()));
        assert!(has_stable_solution(&example2()));
        assert!(!has_stable_solution(&triangle()));
    }

    #[test]
    fn from_dual_arithmetic() {
        let inst = two_player(int(7));
        let m: BMatching = [0].into_iter().collect();
        let sol = stable_from_dual(&inst, &m, &DualSolution { y: vec![int(3), int(4)], d: vec![int(0)] }, &SplitRule::Half)
            .unwrap();
        assert_eq!(sol.payoffs.pair(0), &[int(3), int(4)]);
        let inst = two_player(int(4));
        let sol = stable_from_dual(&inst, &m, &DualSolution { y: vec![int(1), int(1)], d: vec![int(2)] }, &SplitRule::Half)
            .unwrap();
        assert_eq!(sol.payoffs.pair(0), &[int(2), int(2)]);
        let sol = stable_from_dual(
            &inst,
            &m,
            &DualSolution { y: vec![int(1), int(1)], d: vec![int(2)] },
            &SplitRule::BuyerSide(vec![true, false]),
        )
        .unwrap();
        assert_eq!(sol.payoffs.pair(0), &[int(1), int(3)]);
    }

    #[test]
    fn gap_is_rejected() {
        let d = diamond();
        let (m, _) = max_weight_b_matching(&d);
        assert!(matches!(
            stable_from_dual(&d, &m, &dual_from_duplicated(&d), &SplitRule::Half),
            Err(Error::DualityGap { .. })
        ));
    }

    #[test]
    fn dual_of_stable() {
        let (inst, sol) = fixtures::example3_solution();
        let dual = dual_from_stable(&inst, &sol).unwrap();
        assert_eq!(dual.y, vec![frac(3, 2), frac(3, 2), int(0), int(0)]);
        assert_eq!(dual_objective(&inst, &dual).unwrap(), int(4));
        let back = stable_from_dual(&inst, &sol.matching, &dual, &SplitRule::Half).unwrap();
        assert!(is_stable(&inst, &back).unwrap().is_stable());
        let inst = two_player(int(7));
        let sol = Solution::new([0].into_iter().collect(), PayoffMatrix::from_ids(&inst, &[("i", "j", int(3), int(4))]).unwrap());
        let dual = dual_from_stable(&inst, &sol).unwrap();
        assert_eq!((dual.y, dual.d), (vec![int(3), int(4)], vec![int(0)]));
    }

    #[test]
    fn slackness() {
        let inst = two_player(int(7));
        let dual = DualSolution { y: vec![int(3), int(4)], d: vec![int(0)] };
        let matched: BMatching = [0].into_iter().collect();
        assert!(verify_complementary_slackness(&inst, &matched, &dual).unwrap().is_clean());
        let report = verify_complementary_slackness(&inst, &BMatching::new(), &dual).unwrap();
        assert_eq!(report.priced_unsaturated, vec![0, 1]);
    }

    #[test]
    fn pipeline() {
        match solve(&diamond()) {
            SolveOutcome::NoStable { witness, half_weight, integral_weight } => {
                assert_eq!((half_weight, integral_weight), (frac(7, 2), int(3)));
                assert!(witness.is_feasible(&diamond()));
                assert_eq!(witness.weight(&diamond()), frac(7, 2));
            }
            other => panic!("expected no stable solution, got {other:?}"),
        }
        let e1 = example1();
        let SolveOutcome::Stable { solution, weight: w, .. } = solve(&e1) else { panic!("example 1 is solvable") };
        assert_eq!(w, int(2));
        assert!(is_stable(&e1, &solution).unwrap().is_stable());

        let e2 = example2();
        let SolveOutcome::Stable { solution, dual, .. } = solve(&e2) else { panic!("example 2 is solvable") };
        assert!(verify_complementary_slackness(&e2, &solution.matching, &dual).unwrap().is_clean());
        let (_, listed, _) = fixtures::example2_solutions();
        let moved = rematch(&e2, &solution, &listed.matching).unwrap();
        assert!(is_stable(&e2, &moved).unwrap().is_stable());
        assert!(are_equivalent(&e2, &moved, &solution).unwrap());
    }
}
