//! Solutions listed verbatim for the named example instances.

use crate::instance::{diamond, example1, example2, example3, Instance};
use crate::matching::BMatching;
use crate::rational::{frac, int, Q};
use crate::stability::{PayoffMatrix, Solution};

fn solution(inst: &Instance, rows: &[(&str, &str, Q, Q)]) -> Solution {
    let pairs: Vec<(&str, &str)> = rows.iter().map(|r| (r.0, r.1)).collect();
    let m = BMatching::from_ids(inst, &pairs).expect("fixture edges exist");
    Solution::new(m, PayoffMatrix::from_ids(inst, rows).expect("fixture edges exist"))
}

/// Example 1: `(M, p)` and `(M^, p^)`.
pub fn example1_solutions() -> (Instance, Solution, Solution) {
    let inst = example1();
    let (hi, lo) = (frac(7, 10), frac(3, 10));
    let sol = solution(&inst, &[("u1", "v1", hi.clone(), lo.clone()), ("u2", "v2", hi.clone(), lo.clone())]);
    let hat = solution(&inst, &[("u1", "v2", hi.clone(), lo.clone()), ("u2", "v1", hi, lo)]);
    (inst, sol, hat)
}

/// Example 2: `(M, p)` and `(M^, p^)`.
pub fn example2_solutions() -> (Instance, Solution, Solution) {
    let inst = example2();
    let sol = solution(
        &inst,
        &[
            ("u1", "v1", int(3), int(1)),
            ("u1", "v2", int(3), int(3)),
            ("u2", "v1", int(2), int(2)),
            ("u3", "v3", int(0), int(2)),
        ],
    );
    let hat = solution(
        &inst,
        &[
            ("u1", "v1", int(3), int(1)),
            ("u1", "v3", int(3), int(2)),
            ("u2", "v1", int(2), int(2)),
            ("u3", "v2", int(0), int(3)),
        ],
    );
    (inst, sol, hat)
}

/// Example 3: `M = {v1v2, v3v4}` with an even split on both edges.
pub fn example3_solution() -> (Instance, Solution) {
    let inst = example3();
    let sol = solution(&inst, &[("v1", "v2", frac(3, 2), frac(3, 2)), ("v3", "v4", frac(1, 2), frac(1, 2))]);
    (inst, sol)
}

/// The diamond's core allocation `(1,1,1,0)` and the cyclic payoffs on the triangle.
pub fn diamond_core_payoff() -> (Instance, Vec<Q>, Solution) {
    let inst = diamond();
    let sol = solution(
        &inst,
        &[("s1", "s2", int(1), int(0)), ("s2", "s3", int(1), int(0)), ("s3", "s1", int(1), int(0))],
    );
    (inst, vec![int(1), int(1), int(1), int(0)], sol)
}
