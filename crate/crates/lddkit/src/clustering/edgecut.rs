//! Edge-cutting clustering: terminal clustering of the subdivided graph with
//! radii on the edge midpoints, mapped back to the original nodes.

use num_traits::{One, Zero};

use super::rbsplit::det_depth;
use super::steroids::{compose_ruling, det_bad_bound, rand_depth, steroids, Cluster, SteroidsInput, TerminalClustering};
use super::ClusterError;
use crate::graph::{Graph, Subgraph, NONE};
use crate::oracles::Oracles;
use crate::params::{eps_steroids, Choice, SelfCheck};
use crate::rational::{floor_i128, min_q, qi, Q};

pub struct EdgeCutInput<'a> {
    pub h: &'a Subgraph,
    /// weight per edge of G, read on alive edges
    pub mu: &'a [u64],
    pub q: &'a [bool],
    pub del: &'a [Q],
    pub ruling: Q,
    pub eps: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCut {
    /// clusters on the nodes of H
    pub clusters: Vec<Cluster>,
    pub cluster_of: Vec<u32>,
    pub terminals: Vec<bool>,
    /// alive edges whose endpoints sit in different clusters
    pub cut: Vec<usize>,
    pub eps_inner: Q,
    pub d_inner: Q,
    /// (a_tot - 1) R + b_tot, at most eps R
    pub slack: Q,
    /// deterministic bound on mu(cut); None when the inner distance is zero
    pub cut_bound: Option<Q>,
    pub inner: TerminalClustering,
}

/// Round a non-negative rational down to a multiple of 1/64.
fn round_down(x: &Q) -> Q {
    if x.is_zero() || x < &Q::zero() {
        return Q::zero();
    }
    Q::new(floor_i128(&(x * qi(64))).into(), 64.into())
}

pub fn edge_cutting(o: &Oracles, g: &Graph, inp: &EdgeCutInput, mut choice: Choice, check: SelfCheck) -> Result<EdgeCut, ClusterError> {
    let n = g.n();
    let h = inp.h;
    let (gs, map) = g.subdivide();
    let ns = gs.n();
    let mut alive = h.node.clone();
    alive.extend((0..g.m()).map(|k| h.edge_alive(g, k)));
    let hs = Subgraph::induced(&gs, &alive);
    let mut r = vec![0u64; ns];
    let mut mu = vec![0u64; ns];
    for (k, &ve) in map.iter().enumerate() {
        if alive[ve] {
            r[ve] = g.edge(k).len;
            mu[ve] = inp.mu[k];
        }
    }
    let mut q = inp.q.to_vec();
    q.resize(ns, false);
    let mut del = inp.del.to_vec();
    del.resize(ns, Q::zero());

    let eps = &inp.eps;
    let big_r = &inp.ruling;
    let target = eps * big_r;
    let phases = gs.b();
    let sum_mu_r: i128 = (0..ns).filter(|&v| alive[v]).map(|v| mu[v] as i128 * r[v] as i128).sum();
    let depth_hat = if choice.is_det() { det_depth(sum_mu_r) } else { rand_depth(&target) };
    let mut eps_in = min_q(&eps_steroids(ns), &(eps / qi(4 * phases as i128 * (depth_hat as i128 + 1))));
    let depths = vec![depth_hat; phases as usize];
    let (d_in, eps_in) = loop {
        let (a, _) = compose_ruling(&depths, &eps_in, &Q::zero());
        let (_, beta) = compose_ruling(&depths, &eps_in, &Q::one());
        let room = &target - (&a - Q::one()) * big_r;
        if room >= Q::zero() {
            break (round_down(&(room / (beta.max(Q::one())))), eps_in);
        }
        eps_in /= qi(2);
    };

    let sin = SteroidsInput { h: &hs, r: &r, mu: &mu, q: &q, del: &del, ruling: big_r.clone(), d: d_in.clone(), eps: eps_in.clone() };
    let tc = steroids(o, &gs, &sin, choice.reborrow(), check)?;
    let (a, b) = compose_ruling(&tc.depths(), &eps_in, &d_in);
    let slack = (a - Q::one()) * big_r + b;
    if slack > target {
        return Err(ClusterError::Invariant { phase: phases, msg: format!("distance slack {} exceeds eps R = {}", slack, target) });
    }

    let mut cluster_of = vec![NONE; n];
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut renum = vec![NONE; tc.clusters.len()];
    for v in h.nodes() {
        let c = tc.cluster_of[v] as usize;
        if renum[c] == NONE {
            renum[c] = clusters.len() as u32;
            let inner = &tc.clusters[c];
            clusters.push(Cluster { terminal: inner.terminal, nodes: Vec::new(), radius: inner.radius.clone() });
        }
        cluster_of[v] = renum[c];
        clusters[renum[c] as usize].nodes.push(v);
    }
    let cut: Vec<usize> = (0..g.m())
        .filter(|&k| h.edge_alive(g, k) && cluster_of[g.edge(k).u] != cluster_of[g.edge(k).v])
        .collect();
    for &k in &cut {
        if !tc.bad[map[k]] {
            return Err(ClusterError::Invariant { phase: phases, msg: format!("edge {} is cut but its midpoint is good", k) });
        }
    }
    let cut_bound = det_bad_bound(&tc.depths(), &eps_in, &d_in, sum_mu_r);
    let terminals = tc.terminals[..n].to_vec();
    Ok(EdgeCut { clusters, cluster_of, terminals, cut, eps_inner: eps_in, d_inner: d_in, slack, cut_bound, inner: tc })
}
