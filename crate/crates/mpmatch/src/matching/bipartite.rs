//! Bipartite maximum-weight b-matching with an optimal dual, by
//! successive shortest paths on a min-cost flow network.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{pos, Q};

use super::BMatching;

/// Optimal dual of the bipartite b-matching LP:
/// `min sum b(i) y(i) + sum d(ij)` subject to `y(i) + y(j) + d(ij) >= w(ij)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteDualCertificate {
    /// `y`, indexed by player.
    pub potentials: Vec<Q>,
    /// `d`, indexed by edge.
    pub slacks: Vec<Q>,
}

impl BipartiteDualCertificate {
    pub fn objective(&self, inst: &Instance) -> Q {
        let mut total = Q::zero();
        for (i, y) in self.potentials.iter().enumerate() {
            total += y * Q::from_integer(inst.capacity(i).into());
        }
        for d in &self.slacks {
            total += d;
        }
        total
    }
}

struct Arc {
    to: usize,
    cap: i64,
    cost: Q,
}

struct Network {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network { arcs: Vec::new(), out: vec![Vec::new(); n] }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64, cost: Q) -> usize {
        let id = self.arcs.len();
        self.out[from].push(id);
        self.arcs.push(Arc { to, cap, cost: cost.clone() });
        self.out[to].push(id + 1);
        self.arcs.push(Arc { to: from, cap: 0, cost: -cost });
        id
    }

    /// Bellman-Ford distances from `sources` (all at distance 0) over arcs
    /// with positive residual capacity. The residual graph never has a
    /// negative cycle here.
    fn distances(&self, sources: &[usize]) -> (Vec<Option<Q>>, Vec<usize>) {
        let n = self.out.len();
        let mut dist: Vec<Option<Q>> = vec![None; n];
        let mut pred = vec![usize::MAX; n];
        for &s in sources {
            dist[s] = Some(Q::zero());
        }
        for round in 0..=n {
            let mut changed = false;
            for u in 0..n {
                let Some(du) = dist[u].clone() else { continue };
                for &a in &self.out[u] {
                    let arc = &self.arcs[a];
                    if arc.cap <= 0 {
                        continue;
                    }
                    let cand = &du + &arc.cost;
                    if dist[arc.to].as_ref().is_none_or(|dv| cand < *dv) {
                        dist[arc.to] = Some(cand);
                        pred[arc.to] = a;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            assert!(round < n, "negative cycle in residual network");
        }
        (dist, pred)
    }
}

/// Maximum-weight b-matching of a bipartite instance together with an
/// optimal dual certificate satisfying complementary slackness.
pub fn bipartite_max_weight_b_matching_with_duals(inst: &Instance) -> Result<(BMatching, BipartiteDualCertificate)> {
    let color = inst.two_coloring().ok_or(Error::NotBipartite)?;
    let n = inst.n();
    let (s, t) = (n, n + 1);
    let mut net = Network::new(n + 2);
    for i in 0..n {
        let b = inst.capacity(i) as i64;
        if color[i] == 0 {
            net.add(s, i, b, Q::zero());
        } else {
            net.add(i, t, b, Q::zero());
        }
    }
    let mut edge_arc = Vec::with_capacity(inst.m());
    for e in inst.edges() {
        let (l, r) = if color[e.u] == 0 { (e.u, e.v) } else { (e.v, e.u) };
        edge_arc.push(net.add(l, r, 1, -e.w.clone()));
    }

    loop {
        let (dist, pred) = net.distances(&[s]);
        let Some(cost) = dist[t].clone() else { break };
        if !cost.is_negative() {
            break;
        }
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let a = pred[v];
            path.push(a);
            v = net.arcs[a ^ 1].to;
        }
        let push = path.iter().map(|&a| net.arcs[a].cap).min().expect("nonempty path");
        for a in path {
            net.arcs[a].cap -= push;
            net.arcs[a ^ 1].cap += push;
        }
    }

    let matching: BMatching = edge_arc
        .iter()
        .enumerate()
        .filter(|(_, &a)| net.arcs[a].cap == 0)
        .map(|(k, _)| k)
        .collect();

    // Final potentials: the flow closes into a circulation through t -> s.
    let flow: i64 = net.out[s].iter().map(|&a| net.arcs[a ^ 1].cap).sum();
    net.add(t, s, i64::MAX / 4, Q::zero());
    if flow > 0 {
        net.add(s, t, flow, Q::zero());
    }
    let all: Vec<usize> = (0..n + 2).collect();
    let (pi, _) = net.distances(&all);
    let pi: Vec<Q> = pi.into_iter().map(|d| d.expect("reachable from every source")).collect();
    let potentials: Vec<Q> = (0..n)
        .map(|i| if color[i] == 0 { pos(&(&pi[i] - &pi[s])) } else { pos(&(&pi[t] - &pi[i])) })
        .collect();
    let slacks = inst
        .edges()
        .iter()
        .map(|e| pos(&(&e.w - &potentials[e.u] - &potentials[e.v])))
        .collect();
    Ok((matching, BipartiteDualCertificate { potentials, slacks }))
}
