//! JSON shapes for solutions, verdicts and certificates. Players are named
//! by id and rationals are written as `"num/den"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::core_game::{CoreVerdict, CoreViolation};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matching::{BMatching, HalfBMatching};
use crate::rational::{self, Q};
use crate::solver::{DualSolution, SolveOutcome};
use crate::stability::{PayoffMatrix, Solution, StabilityVerdict};

fn q(s: &Q) -> String {
    rational::format(s)
}

fn pairs(inst: &Instance, m: &BMatching) -> Vec<[String; 2]> {
    m.id_pairs(inst).into_iter().map(|(u, v)| [u, v]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffRow {
    pub u: String,
    pub v: String,
    pub p_uv: String,
    pub p_vu: String,
}

/// `{"matching": [[u, v], ...], "payoffs": [{"u", "v", "p_uv", "p_vu"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub matching: Vec<[String; 2]>,
    pub payoffs: Vec<PayoffRow>,
}

impl SolutionJson {
    /// Rows are written for matched edges only.
    pub fn from_solution(inst: &Instance, sol: &Solution) -> Self {
        SolutionJson { matching: pairs(inst, &sol.matching), payoffs: payoff_rows(inst, &sol.payoffs, Some(&sol.matching)) }
    }

    /// Unlisted edges get zero payoffs; no compatibility check is made.
    pub fn to_solution(&self, inst: &Instance) -> Result<Solution> {
        let m = BMatching::from_ids(inst, &self.matching.iter().map(|[u, v]| (u.as_str(), v.as_str())).collect::<Vec<_>>())?;
        let rows = self
            .payoffs
            .iter()
            .map(|r| Ok((r.u.as_str(), r.v.as_str(), rational::parse(&r.p_uv)?, rational::parse(&r.p_vu)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Solution::new(m, PayoffMatrix::from_ids(inst, &rows)?))
    }
}

/// Payoff rows for every edge, or only those in `only`.
pub fn payoff_rows(inst: &Instance, p: &PayoffMatrix, only: Option<&BMatching>) -> Vec<PayoffRow> {
    inst.edges()
        .iter()
        .enumerate()
        .filter(|(k, _)| only.is_none_or(|m| m.contains(*k)))
        .map(|(k, e)| {
            let [a, b] = p.pair(k);
            PayoffRow { u: inst.id(e.u).into(), v: inst.id(e.v).into(), p_uv: q(a), p_vu: q(b) }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfRow {
    pub edge: [String; 2],
    pub value: String,
}

pub fn half_rows(inst: &Instance, h: &HalfBMatching) -> Vec<HalfRow> {
    inst.edges()
        .iter()
        .zip(&h.values)
        .map(|(e, v)| HalfRow { edge: [inst.id(e.u).into(), inst.id(e.v).into()], value: v.to_string() })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackRow {
    pub u: String,
    pub v: String,
    pub d: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualJson {
    pub y: BTreeMap<String, String>,
    pub d: Vec<SlackRow>,
    pub objective: String,
}

impl DualJson {
    pub fn new(inst: &Instance, dual: &DualSolution) -> Self {
        let objective = crate::solver::dual_objective(inst, dual).expect("dual sized for the instance");
        DualJson {
            y: (0..inst.n()).map(|i| (inst.id(i).to_string(), q(&dual.y[i]))).collect(),
            d: inst
                .edges()
                .iter()
                .zip(&dual.d)
                .map(|(e, d)| SlackRow { u: inst.id(e.u).into(), v: inst.id(e.v).into(), d: q(d) })
                .collect(),
            objective: q(&objective),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveOutcomeJson {
    Stable { weight: String, solution: SolutionJson, dual: DualJson, utilities: BTreeMap<String, String> },
    NoStable { integral_weight: String, half_weight: String, witness: Vec<HalfRow> },
}

impl SolveOutcomeJson {
    pub fn new(inst: &Instance, outcome: &SolveOutcome) -> Self {
        match outcome {
            SolveOutcome::Stable { solution, dual, weight } => SolveOutcomeJson::Stable {
                weight: q(weight),
                solution: SolutionJson::from_solution(inst, solution),
                dual: DualJson::new(inst, dual),
                utilities: utility_map(inst, &crate::stability::utilities(inst, solution).expect("stable output")),
            },
            SolveOutcome::NoStable { witness, half_weight, integral_weight } => SolveOutcomeJson::NoStable {
                integral_weight: q(integral_weight),
                half_weight: q(half_weight),
                witness: half_rows(inst, witness),
            },
        }
    }
}

pub fn utility_map(inst: &Instance, u: &[Q]) -> BTreeMap<String, String> {
    (0..inst.n()).map(|i| (inst.id(i).to_string(), q(&u[i]))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityJson {
    pub stable: bool,
    pub blocking: Vec<[String; 2]>,
    pub utilities: BTreeMap<String, String>,
}

impl StabilityJson {
    pub fn new(inst: &Instance, verdict: &StabilityVerdict, u: &[Q]) -> Self {
        let blocking = match verdict {
            StabilityVerdict::Stable => Vec::new(),
            StabilityVerdict::Unstable { blocking } => blocking
                .iter()
                .map(|&k| [inst.id(inst.edge(k).u).to_string(), inst.id(inst.edge(k).v).to_string()])
                .collect(),
        };
        StabilityJson { stable: verdict.is_stable(), blocking, utilities: utility_map(inst, u) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationJson {
    pub coalition: Vec<String>,
    pub x_s: String,
    pub v_s: String,
    pub deficit: String,
    pub witness: Vec<[String; 2]>,
}

impl ViolationJson {
    pub fn new(inst: &Instance, v: &CoreViolation) -> Self {
        ViolationJson {
            coalition: v.coalition.ids(inst),
            x_s: q(&v.x_s),
            v_s: q(&v.v_s),
            deficit: q(&v.deficit),
            witness: pairs(inst, &v.witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CoreVerdictJson {
    InCore,
    NotAllocation { x_n: String, v_n: String },
    Violation(ViolationJson),
}

impl CoreVerdictJson {
    pub fn new(inst: &Instance, verdict: &CoreVerdict) -> Self {
        match verdict {
            CoreVerdict::InCore => CoreVerdictJson::InCore,
            CoreVerdict::NotAllocation { x_n, v_n } => CoreVerdictJson::NotAllocation { x_n: q(x_n), v_n: q(v_n) },
            CoreVerdict::Violation(v) => CoreVerdictJson::Violation(ViolationJson::new(inst, v)),
        }
    }
}

/// Reads an allocation `{"player": "value", ...}`; every player must appear.
pub fn parse_allocation(inst: &Instance, text: &str) -> Result<Vec<Q>> {
    let raw: BTreeMap<String, serde_json::Value> = serde_json::from_str(text)?;
    let mut x = vec![None; inst.n()];
    for (id, value) in raw {
        let i = inst.index_of(&id)?;
        let s = match value {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(Error::Parse(format!("allocation entry for {id:?} is not a number: {other}"))),
        };
        x[i] = Some(rational::parse(&s)?);
    }
    x.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("allocation has no entry for {:?}", inst.id(i)))))
        .collect()
}

pub fn allocation_json(inst: &Instance, x: &[Q]) -> BTreeMap<String, String> {
    utility_map(inst, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::diamond;
    use crate::rational::int;
    use crate::solver::solve;

    #[test]
    fn solution_round_trip() {
        let (inst, sol, _) = fixtures::example2_solutions();
        let json = serde_json::to_string(&SolutionJson::from_solution(&inst, &sol)).unwrap();
        let back: SolutionJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_solution(&inst).unwrap(), sol);
    }

    #[test]
    fn outcome_shapes() {
        let d = diamond();
        let v = serde_json::to_value(SolveOutcomeJson::new(&d, &solve(&d))).unwrap();
        assert_eq!(v["status"], "no_stable");
        assert_eq!(v["half_weight"], "7/2");
        let (inst, sol) = fixtures::example3_solution();
        let v = serde_json::to_value(SolveOutcomeJson::new(&inst, &solve(&inst))).unwrap();
        assert_eq!(v["status"], "stable");
        let _ = sol;
    }

    #[test]
    fn allocation_parsing() {
        let d = diamond();
        let x = parse_allocation(&d, r#"{"s1":"1","s2":1,"s3":"1","u":"0"}"#).unwrap();
        assert_eq!(x, vec![int(1), int(1), int(1), int(0)]);
        assert!(parse_allocation(&d, r#"{"s1":"1"}"#).is_err());
        assert!(parse_allocation(&d, r#"{"s1":"1","s2":1,"s3":"1","u":"0","zz":"1"}"#).is_err());
        assert_eq!(parse_allocation(&d, &serde_json::to_string(&allocation_json(&d, &x)).unwrap()).unwrap(), x);
    }

    #[test]
    fn verdict_shape() {
        let (inst, x, _) = fixtures::diamond_core_payoff();
        let v = crate::core_game::core_membership_b2(&inst, &x).unwrap();
        assert_eq!(serde_json::to_value(CoreVerdictJson::new(&inst, &v)).unwrap()["verdict"], "in_core");
    }
}
