//! Padded partitions and sparse covers built from them by weight doubling.

use num_bigint::BigInt;
use num_traits::Zero;

use super::steroids::{steroids, SteroidsInput, TerminalClustering};
use super::ClusterError;
use crate::graph::{dist_from, Graph, Subgraph};
use crate::oracles::Oracles;
use crate::params::{eps_steroids, Choice, SelfCheck};
use crate::rational::{ceil_log2_u, qi, qu, Q};

/// Starting constant for D_steroids = c * ceil(log2 n) * D. The run doubles c until
/// the bad weight is at most a tenth of the total, so this only affects speed.
pub const DEFAULT_PADDING_C: u64 = 2;

const WEIGHT_LIMIT: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedPartition {
    pub clustering: TerminalClustering,
    pub d: u64,
    /// constant actually used after escalation
    pub c: u64,
    pub d_steroids: Q,
    pub eps: Q,
    /// every cluster has strong diameter at most this
    pub diameter_bound: Q,
    pub bad_weight: u128,
    pub total_weight: u128,
}

impl PaddedPartition {
    pub fn good(&self) -> &[bool] {
        &self.clustering.good
    }
    pub fn cluster_of(&self) -> &[u32] {
        &self.clustering.cluster_of
    }
}

fn log_n(n: usize) -> u64 {
    ceil_log2_u(n.max(4) as u64) as u64
}

/// Partition with B(v, D) inside one cluster for every good v and mu(bad) <= mu(V)/10.
pub fn padded_partition(
    o: &Oracles,
    g: &Graph,
    d: u64,
    mu: &[u64],
    c0: u64,
    mut choice: Choice,
    check: SelfCheck,
) -> Result<PaddedPartition, ClusterError> {
    let n = g.n();
    let h = Subgraph::full(g);
    let r = vec![d; n];
    let q = vec![true; n];
    let del = vec![Q::zero(); n];
    let eps = eps_steroids(n);
    let total: u128 = mu.iter().map(|&x| x as u128).sum();
    let mut c = c0.max(1);
    loop {
        let d_st = qu(c * log_n(n) * d);
        let inp = SteroidsInput { h: &h, r: &r, mu, q: &q, del: &del, ruling: Q::zero(), d: d_st.clone(), eps: eps.clone() };
        let tc = steroids(o, g, &inp, choice.reborrow(), check)?;
        let bad: u128 = (0..n).filter(|&v| tc.bad[v]).map(|v| mu[v] as u128).sum();
        if 10 * bad <= total || d == 0 {
            let diameter_bound = qi(2) * &tc.b_tot;
            return Ok(PaddedPartition { clustering: tc, d, c, d_steroids: d_st, eps, diameter_bound, bad_weight: bad, total_weight: total });
        }
        c *= 2;
    }
}

/// Smallest t with 2^(t - ceil(2t/3) + 1) > n * 1.1^t, so that doubling weights forces
/// every node to be good in at least ceil(2t/3) of the t rounds.
pub fn cover_rounds(n: usize) -> u32 {
    let mut t = 1u32;
    loop {
        let lhs = BigInt::from(2u8).pow(t - (2 * t).div_ceil(3) + 1) * BigInt::from(10u8).pow(t);
        let rhs = BigInt::from(n) * BigInt::from(11u8).pow(t);
        if lhs > rhs {
            return t;
        }
        t += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub d: u64,
    pub t: u32,
    pub partitions: Vec<PaddedPartition>,
    /// padded[i][v]: B(v, D) lies inside the cluster of v in partition i
    pub padded: Vec<Vec<bool>>,
}

impl Cover {
    pub fn padded_count(&self, v: usize) -> usize {
        self.padded.iter().filter(|p| p[v]).count()
    }
    pub fn good_count(&self, v: usize) -> usize {
        self.partitions.iter().filter(|p| p.clustering.good[v]).count()
    }
}

/// B(v, D) inside the cluster of v, by truncated Dijkstra in G.
pub fn padded_nodes(g: &Graph, cluster_of: &[u32], d: u64) -> Vec<bool> {
    (0..g.n())
        .map(|v| {
            let ball = dist_from(g, None, v, Some(d as i128));
            ball.iter().enumerate().all(|(u, x)| x.is_none() || cluster_of[u] == cluster_of[v])
        })
        .collect()
}

pub fn sparse_cover(o: &Oracles, g: &Graph, d: u64, rounds: Option<u32>, mut choice: Choice, check: SelfCheck) -> Result<Cover, ClusterError> {
    let n = g.n();
    let t_min = cover_rounds(n);
    let t = rounds.unwrap_or(t_min);
    let mut mu = vec![1u64; n];
    let mut partitions = Vec::with_capacity(t as usize);
    let mut padded = Vec::with_capacity(t as usize);
    for round in 0..t {
        let p = padded_partition(o, g, d, &mu, DEFAULT_PADDING_C, choice.reborrow(), check)?;
        for v in 0..n {
            if !p.clustering.good[v] {
                if mu[v] >= WEIGHT_LIMIT {
                    return Err(ClusterError::WeightOverflow { rounds: round + 1 });
                }
                mu[v] *= 2;
            }
        }
        padded.push(padded_nodes(g, &p.clustering.cluster_of, d));
        partitions.push(p);
    }
    let cover = Cover { d, t, partitions, padded };
    if t >= t_min {
        let need = (2 * t as usize).div_ceil(3);
        for v in 0..n {
            if cover.good_count(v) < need {
                return Err(ClusterError::Invariant { phase: t, msg: format!("node {} good in {} < {} rounds", v, cover.good_count(v), need) });
            }
        }
    }
    Ok(cover)
}
