//! `mpmatch`: JSON in, JSON out. Exit codes: 0 ok, 3 negative verdict,
//! 1 malformed input, 2 failed precondition.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mpmatch::core_game::{
    core_membership_b2, core_membership_bruteforce, core_membership_bruteforce_with, game_value_with_witness,
    BruteForceOptions, CORE_BRUTE_FORCE_BOUND,
};
use mpmatch::instance::{generate, random_instance, seeded_rng, Family, InstanceSpec, RandomParams};
use mpmatch::json::{allocation_json, parse_allocation, CoreVerdictJson, SolutionJson, SolveOutcomeJson, StabilityJson};
use mpmatch::matching::{max_half_b_matching_weight, max_weight_b_matching, max_weight_b_matching_bruteforce};
use mpmatch::rational::{self, Q};
use mpmatch::reduction::ReducedInstance;
use mpmatch::solver::{solve, SolveOutcome};
use mpmatch::stability::{is_stable, total_payoff, utilities};
use mpmatch::{Coalition, Error, Instance};
use serde::Serialize;
use serde_json::json;

const EXIT_NEGATIVE: u8 = 3;
const EXIT_MALFORMED: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;

#[derive(Parser)]
#[command(name = "mpmatch", version, about = "Stable solutions and core checks for multiple partners matching games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a stable solution or a fractional witness that none exists.
    Solve {
        /// Instance JSON file, or `-` for standard input.
        instance: PathBuf,
    },
    /// Check a solution for compatibility and blocking pairs.
    VerifyStable { instance: PathBuf, solution: PathBuf },
    /// Decide whether an allocation lies in the core.
    CoreCheck {
        instance: PathBuf,
        /// Allocation JSON: `{"player": "value", ...}`.
        allocation: PathBuf,
        /// Enumerate coalitions instead of the capacity-2 algorithm.
        #[arg(long)]
        brute_force: bool,
        /// Largest player count accepted by --brute-force.
        #[arg(long, default_value_t = CORE_BRUTE_FORCE_BOUND)]
        bound: usize,
        /// Worker threads for coalition values.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the unit-capacity reduced instance and its provenance map.
    Reduce { instance: PathBuf },
    /// Game value v(S) of a coalition, with an optimal b-matching of G[S].
    Value {
        instance: PathBuf,
        /// Comma-separated player ids; all players when omitted.
        #[arg(long, value_delimiter = ',')]
        coalition: Option<Vec<String>>,
    },
    /// Print a named instance.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyName,
        #[arg(long, default_value_t = 2)]
        alpha: u32,
        /// Edge weight for two-player.
        #[arg(long, default_value = "1")]
        w: String,
        /// Bipartite base instance for cubic-gadget.
        #[arg(long)]
        base: Option<PathBuf>,
        /// Also write the family's companion allocation here.
        #[arg(long)]
        allocation: Option<PathBuf>,
    },
    /// Compare the fast engines with exhaustive search on random instances.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        max_players: usize,
        #[arg(long, default_value_t = 2)]
        max_capacity: u32,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Example1,
    Example2,
    Example3,
    Example4,
    Diamond,
    Triangle,
    TwoPlayer,
    CubicGadget,
}

enum Failure {
    Malformed(String),
    Precondition(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Invalid(_) | Error::UnknownPlayer(_) | Error::UnknownEdge(..) | Error::Json(_) => {
                Failure::Malformed(e.to_string())
            }
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

type Run = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        fs::read_to_string(path)
    };
    text.map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    Ok(Instance::from_json(&read(path)?)?)
}

fn emit<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    // A closed pipe is not an error of ours.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn cmd_solve(path: &Path) -> Run {
    let inst = load(path)?;
    let outcome = solve(&inst);
    emit(&SolveOutcomeJson::new(&inst, &outcome));
    Ok(outcome.is_stable())
}

fn cmd_verify(inst_path: &Path, sol_path: &Path) -> Run {
    let inst = load(inst_path)?;
    let raw: SolutionJson = serde_json::from_str(&read(sol_path)?).map_err(Error::from)?;
    let sol = raw.to_solution(&inst)?;
    let verdict = is_stable(&inst, &sol)?;
    emit(&StabilityJson::new(&inst, &verdict, &utilities(&inst, &sol)?));
    Ok(verdict.is_stable())
}

fn cmd_core_check(inst_path: &Path, alloc_path: &Path, brute: bool, bound: usize, jobs: Option<usize>) -> Run {
    let inst = load(inst_path)?;
    let x = parse_allocation(&inst, &read(alloc_path)?)?;
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Precondition(e.to_string()))?;
    }
    let verdict = if brute {
        core_membership_bruteforce_with(&inst, &x, &BruteForceOptions { bound, ground: None })?
    } else {
        core_membership_b2(&inst, &x)?
    };
    emit(&CoreVerdictJson::new(&inst, &verdict));
    Ok(verdict.is_in_core())
}

fn cmd_reduce(path: &Path) -> Run {
    let inst = load(path)?;
    let reduced = ReducedInstance::new(&inst);
    emit(&json!({
        "instance": reduced.instance.to_spec(),
        "provenance": reduced.provenance_entries(&inst),
    }));
    Ok(true)
}

fn cmd_value(path: &Path, coalition: Option<Vec<String>>) -> Run {
    let inst = load(path)?;
    let s = match coalition {
        Some(ids) => Coalition::from_ids(&inst, &ids)?,
        None => Coalition::all(&inst),
    };
    let (v, witness) = game_value_with_witness(&inst, &s);
    let pairs: Vec<[String; 2]> = witness.id_pairs(&inst).into_iter().map(|(u, v)| [u, v]).collect();
    emit(&json!({ "coalition": s.ids(&inst), "value": rational::format(&v), "witness": pairs }));
    Ok(true)
}

fn cmd_gen(family: FamilyName, alpha: u32, w: &str, base: Option<&Path>, allocation: Option<&Path>) -> Run {
    let family = match family {
        FamilyName::Example1 => Family::Example1,
        FamilyName::Example2 => Family::Example2,
        FamilyName::Example3 => Family::Example3,
        FamilyName::Example4 => Family::Example4 { alpha },
        FamilyName::Diamond => Family::Diamond,
        FamilyName::Triangle => Family::Triangle,
        FamilyName::TwoPlayer => Family::TwoPlayer { w: rational::parse(w)? },
        FamilyName::CubicGadget => {
            let base = base.ok_or_else(|| Failure::Malformed("cubic-gadget needs --base".into()))?;
            Family::CubicGadget { base: load(base)? }
        }
    };
    let generated = generate(&family)?;
    if let Some(out) = allocation {
        let x = generated
            .allocation
            .as_ref()
            .ok_or_else(|| Failure::Precondition("this family has no companion allocation".into()))?;
        let text = serde_json::to_string_pretty(&allocation_json(&generated.instance, x)).expect("serializable");
        fs::write(out, text + "\n").map_err(|e| Failure::Precondition(format!("{}: {e}", out.display())))?;
    }
    emit(&generated.instance.to_spec());
    Ok(true)
}

#[derive(Serialize)]
struct Mismatch {
    round: usize,
    check: &'static str,
    instance: InstanceSpec,
}

fn cmd_oracle(seed: u64, count: usize, params: RandomParams) -> Run {
    let mut rng = seeded_rng(seed);
    let mut mismatches = Vec::new();
    let mut skipped = 0usize;
    for round in 0..count {
        let inst = random_instance(&mut rng, &params);
        let mut fail = |check| mismatches.push(Mismatch { round, check, instance: inst.to_spec() });
        let (_, w) = max_weight_b_matching(&inst);
        let brute = match max_weight_b_matching_bruteforce(&inst) {
            Ok((_, wb)) => wb,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if w != brute {
            fail("matching");
        }
        let (half, _) = max_half_b_matching_weight(&inst);
        let outcome = solve(&inst);
        if outcome.is_stable() != (half == brute) {
            fail("solve");
        }
        if inst.max_capacity() <= 2 && inst.n() <= CORE_BRUTE_FORCE_BOUND {
            let x: Vec<Q> = match &outcome {
                SolveOutcome::Stable { solution, .. } => total_payoff(&inst, &solution.payoffs),
                SolveOutcome::NoStable { .. } => vec![brute.clone() / Q::from_integer((inst.n() as i64).into()); inst.n()],
            };
            let (fast, slow) = (core_membership_b2(&inst, &x)?, core_membership_bruteforce(&inst, &x)?);
            if !fast.same_kind(&slow) {
                fail("core");
            }
        }
    }
    let ok = mismatches.is_empty();
    emit(&json!({ "seed": seed, "instances": count, "skipped": skipped, "mismatches": mismatches }));
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { instance } => cmd_solve(&instance),
        Command::VerifyStable { instance, solution } => cmd_verify(&instance, &solution),
        Command::CoreCheck { instance, allocation, brute_force, bound, jobs } => {
            cmd_core_check(&instance, &allocation, brute_force, bound, jobs)
        }
        Command::Reduce { instance } => cmd_reduce(&instance),
        Command::Value { instance, coalition } => cmd_value(&instance, coalition),
        Command::Gen { family, alpha, w, base, allocation } => {
            cmd_gen(family, alpha, &w, base.as_deref(), allocation.as_deref())
        }
        Command::Oracle { seed, count, max_players, max_capacity, max_weight } => {
            let params = RandomParams { max_players, max_capacity, max_weight, ..RandomParams::default() };
            cmd_oracle(seed, count, params)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NEGATIVE),
        Err(Failure::Malformed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_MALFORMED)
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}
