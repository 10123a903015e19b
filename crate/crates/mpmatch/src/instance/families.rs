//! Named instance families.

use crate::error::{Error, Result};
use crate::rational::{frac, int, Q};

use super::{Edge, Instance};

/// A generator name with its parameters.
#[derive(Debug, Clone)]
pub enum Family {
    Example1,
    Example2,
    Example3,
    Example4 { alpha: u32 },
    Diamond,
    Triangle,
    TwoPlayer { w: Q },
    CubicGadget { base: Instance },
}

/// Generator output: the instance plus the companion allocation, if the
/// family defines one (indexed by player).
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub allocation: Option<Vec<Q>>,
}

pub fn generate(family: &Family) -> Result<Generated> {
    let plain = |instance| Ok(Generated { instance, allocation: None });
    match family {
        Family::Example1 => plain(example1()),
        Family::Example2 => plain(example2()),
        Family::Example3 => plain(example3()),
        Family::Example4 { alpha } => {
            let (instance, x) = example4(*alpha)?;
            Ok(Generated { instance, allocation: Some(x) })
        }
        Family::Diamond => Ok(Generated {
            instance: diamond(),
            allocation: Some(vec![int(1), int(1), int(1), int(0)]),
        }),
        Family::Triangle => plain(triangle()),
        Family::TwoPlayer { w } => plain(two_player(w.clone())),
        Family::CubicGadget { base } => {
            let (instance, x) = cubic_gadget(base)?;
            Ok(Generated { instance, allocation: Some(x) })
        }
    }
}

fn ones(edges: &[(&'static str, &'static str)]) -> Vec<(&'static str, &'static str, Q)> {
    edges.iter().map(|&(u, v)| (u, v, int(1))).collect()
}

/// The 4-cycle `u1 v1 u2 v2` with unit capacities and weights.
pub fn example1() -> Instance {
    Instance::build(
        &[("u1", 1), ("v1", 1), ("u2", 1), ("v2", 1)],
        &ones(&[("u1", "v1"), ("u1", "v2"), ("u2", "v1"), ("u2", "v2")]),
    )
    .expect("valid")
}

/// The six-player bipartite instance with two maximum-weight b-matchings.
pub fn example2() -> Instance {
    Instance::build(
        &[("u1", 2), ("u2", 2), ("u3", 1), ("v1", 2), ("v2", 1), ("v3", 1)],
        &[
            ("u1", "v1", int(4)),
            ("u1", "v2", int(6)),
            ("u1", "v3", int(5)),
            ("u2", "v1", int(4)),
            ("u2", "v2", int(1)),
            ("u3", "v1", int(1)),
            ("u3", "v2", int(3)),
            ("u3", "v3", int(2)),
        ],
    )
    .expect("valid")
}

/// The 4-cycle `v1 v2 v3 v4` with `b = (1,1,2,2)` and `w(v1v2) = 3`.
pub fn example3() -> Instance {
    Instance::build(
        &[("v1", 1), ("v2", 1), ("v3", 2), ("v4", 2)],
        &[("v1", "v2", int(3)), ("v2", "v3", int(1)), ("v3", "v4", int(1)), ("v4", "v1", int(1))],
    )
    .expect("valid")
}

/// Triangle `s1 s2 s3` with `alpha - 1` pendants per vertex, `b = alpha`,
/// unit weights, plus the symmetric allocation `s_i -> alpha - 2/3`.
pub fn example4(alpha: u32) -> Result<(Instance, Vec<Q>)> {
    if alpha < 2 {
        return Err(Error::Precondition(format!("example4 needs alpha >= 2, got {alpha}")));
    }
    let mut players: Vec<(String, u32)> = (1..=3).map(|i| (format!("s{i}"), alpha)).collect();
    let mut edges = vec![("s1".to_string(), "s2".to_string()), ("s1".into(), "s3".into()), ("s2".into(), "s3".into())];
    for i in 1..=3 {
        for j in 1..alpha {
            let t = format!("t{i}_{j}");
            players.push((t.clone(), alpha));
            edges.push((format!("s{i}"), t));
        }
    }
    let p: Vec<(&str, u32)> = players.iter().map(|(s, c)| (s.as_str(), *c)).collect();
    let e: Vec<(&str, &str, Q)> = edges.iter().map(|(u, v)| (u.as_str(), v.as_str(), int(1))).collect();
    let inst = Instance::build(&p, &e)?;
    let share = int(alpha as i64) - frac(2, 3);
    let x = (0..inst.n()).map(|i| if i < 3 { share.clone() } else { int(0) }).collect();
    Ok((inst, x))
}

/// Triangle `s1 s2 s3` plus `u` adjacent to `s2, s3`; `b = (2,2,2,1)`, unit weights.
pub fn diamond() -> Instance {
    Instance::build(
        &[("s1", 2), ("s2", 2), ("s3", 2), ("u", 1)],
        &ones(&[("s1", "s2"), ("s1", "s3"), ("s2", "s3"), ("s2", "u"), ("s3", "u")]),
    )
    .expect("valid")
}

/// Unit triangle with unit capacities.
pub fn triangle() -> Instance {
    Instance::build(&[("a", 1), ("b", 1), ("c", 1)], &ones(&[("a", "b"), ("b", "c"), ("a", "c")])).expect("valid")
}

/// Two players `i`, `j` with unit capacities joined by an edge of weight `w`.
pub fn two_player(w: Q) -> Instance {
    single_edge(w, 1, 1)
}

/// Players `i`, `j` with capacities `bi`, `bj` joined by one edge.
pub fn single_edge(w: Q, bi: u32, bj: u32) -> Instance {
    Instance::build(&[("i", bi), ("j", bj)], &[("i", "j", w)]).expect("weight must be nonnegative")
}

/// Attaches a `K_{3,3}` on `{a_u, b_u, c_u} x {u, x_u, y_u}` to every vertex
/// `u` of a bipartite graph; `b = 3`, unit weights. Capacities and weights of
/// the input are ignored. The companion allocation gives `3/2 - 1/n` to
/// original vertices and `3/2 + 1/(5n)` to gadget vertices.
pub fn cubic_gadget(base: &Instance) -> Result<(Instance, Vec<Q>)> {
    if !base.is_bipartite() {
        return Err(Error::NotBipartite);
    }
    let n = base.n();
    let mut players: Vec<String> = base.players().to_vec();
    let mut edges: Vec<Edge> = base.edges().iter().map(|e| Edge { u: e.u, v: e.v, w: int(1) }).collect();
    for u in 0..n {
        let id = base.id(u);
        let first = players.len();
        for tag in ["a", "b", "c", "x", "y"] {
            players.push(format!("{tag}_{id}"));
        }
        let left = [first, first + 1, first + 2];
        let right = [u, first + 3, first + 4];
        for &l in &left {
            for &r in &right {
                edges.push(Edge { u: l, v: r, w: int(1) });
            }
        }
    }
    let total = players.len();
    let inst = Instance::new(players, vec![3; total], edges)?;
    let nn = n as i64;
    let x = (0..total)
        .map(|i| if i < n { frac(3, 2) - frac(1, nn) } else { frac(3, 2) + frac(1, 5 * nn) })
        .collect();
    Ok((inst, x))
}
