//! Bit-phase loop: one red/blue split per identifier bit until every component
//! of the surviving graph holds exactly one terminal.

use num_traits::{One, Zero};

use super::rbsplit::{rb_split, ruling_coeffs, RbInput};
use super::ClusterError;
use crate::graph::{components, Graph, Subgraph, NONE};
use crate::oracles::{exact_distances, Delays, Oracles};
use crate::params::{Choice, SelfCheck};
use crate::rational::{blur_exponent, inv_one_minus_pow, log2_ceil, qi, Q};

pub struct SteroidsInput<'a> {
    pub h: &'a Subgraph,
    pub r: &'a [u64],
    pub mu: &'a [u64],
    pub q: &'a [bool],
    pub del: &'a [Q],
    pub ruling: Q,
    pub d: Q,
    pub eps: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub terminal: usize,
    pub nodes: Vec<usize>,
    /// max over members of del(q') + d_{H[C]}(q', v)
    pub radius: Q,
}

/// State after a phase: surviving edges, terminals and good nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSnapshot {
    pub phase: u32,
    pub depth: u32,
    pub edges: Vec<bool>,
    pub terminals: Vec<bool>,
    pub good: Vec<bool>,
    /// ruling bound handed to the split of this phase
    pub ruling_in: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalClustering {
    pub clusters: Vec<Cluster>,
    /// cluster index per node, NONE outside H
    pub cluster_of: Vec<u32>,
    pub terminals: Vec<bool>,
    pub good: Vec<bool>,
    pub bad: Vec<bool>,
    pub edges: Vec<bool>,
    /// d_{H_b,del}(Q_b, v) <= a_tot d_{H,del}(Q, v) + b_tot
    pub a_tot: Q,
    pub b_tot: Q,
    pub phases: Vec<PhaseSnapshot>,
}

impl TerminalClustering {
    pub fn depths(&self) -> Vec<u32> {
        self.phases.iter().map(|p| p.depth).collect()
    }
}

/// Per-phase deterministic constant 2 * 10 / (1-eps)^e(D).
pub fn split_bad_constant(d: &Q, eps: &Q) -> Q {
    qi(20) * inv_one_minus_pow(eps, blur_exponent(d))
}

/// Composed deterministic bad-weight bound over the phases, None when D = 0.
pub fn det_bad_bound(depths: &[u32], eps: &Q, d: &Q, sum_mu_r: i128) -> Option<Q> {
    if d.is_zero() {
        return None;
    }
    let c = split_bad_constant(d, eps) * qi(sum_mu_r) / d;
    let mut total = Q::zero();
    for &i in depths {
        total += (Q::one() - Q::new(1.into(), num_bigint::BigInt::from(2u8).pow(i))) * &c;
    }
    Some(total)
}

/// Recursion depth used by coin-driven splits.
pub fn rand_depth(d: &Q) -> u32 {
    if *d <= Q::one() {
        0
    } else {
        log2_ceil(d).max(0) as u32
    }
}

/// Compose the per-phase ruling maps R -> a R + b.
pub fn compose_ruling(depths: &[u32], eps: &Q, d: &Q) -> (Q, Q) {
    let mut a_tot = Q::one();
    let mut b_tot = Q::zero();
    for &i in depths {
        let (a, b) = ruling_coeffs(i, eps, d);
        b_tot = &a * b_tot + b;
        a_tot *= a;
    }
    (a_tot, b_tot)
}

pub fn steroids(o: &Oracles, g: &Graph, inp: &SteroidsInput, mut choice: Choice, check: SelfCheck) -> Result<TerminalClustering, ClusterError> {
    let n = g.n();
    let h = inp.h;
    if h.node_count() > 0 && !h.nodes().any(|v| inp.q[v]) {
        return Err(ClusterError::NoTerminals);
    }
    let mut edges = h.edge.clone();
    let mut terms: Vec<bool> = (0..n).map(|v| inp.q[v] && h.node[v]).collect();
    let mut good = h.node.clone();
    let mut ruling = inp.ruling.clone();
    let mut phases = Vec::new();
    let rand_i = rand_depth(&inp.d);
    for k in 0..g.b() {
        let hk = Subgraph { node: h.node.clone(), edge: edges.clone() };
        let qr: Vec<bool> = (0..n).map(|v| terms[v] && g.id_bit_msb(v, k)).collect();
        let qb: Vec<bool> = (0..n).map(|v| terms[v] && !g.id_bit_msb(v, k)).collect();
        let rb = RbInput {
            h: &hk,
            r: inp.r,
            mu: inp.mu,
            q_red: &qr,
            q_blue: &qb,
            del: inp.del,
            ruling: ruling.clone(),
            d: inp.d.clone(),
            eps: inp.eps.clone(),
            depth: Some(rand_i),
        };
        let out = rb_split(o, g, &rb, choice.reborrow(), check)?;
        let (a, b) = ruling_coeffs(out.depth, &inp.eps, &inp.d);
        let ruling_in = ruling.clone();
        ruling = a * ruling + b;
        edges = out.edges;
        for v in 0..n {
            terms[v] = out.q_red[v] || out.q_blue[v];
            if out.bad[v] {
                good[v] = false;
            }
        }
        if check >= SelfCheck::Fast {
            separation_invariant(g, h, &edges, &terms, k + 1).map_err(|msg| ClusterError::Invariant { phase: k + 1, msg })?;
        }
        phases.push(PhaseSnapshot { phase: k + 1, depth: out.depth, edges: edges.clone(), terminals: terms.clone(), good: good.clone(), ruling_in });
    }
    let depths: Vec<u32> = phases.iter().map(|p| p.depth).collect();
    let (a_tot, b_tot) = compose_ruling(&depths, &inp.eps, &inp.d);

    let hb = Subgraph { node: h.node.clone(), edge: edges.clone() };
    let (comp, kc) = components(g, &hb);
    let mut term_of = vec![usize::MAX; kc];
    for v in h.nodes() {
        if terms[v] {
            let c = comp[v] as usize;
            if term_of[c] != usize::MAX {
                return Err(ClusterError::Invariant { phase: g.b(), msg: format!("terminals {} and {} share a component", term_of[c], v) });
            }
            term_of[c] = v;
        }
    }
    let src: Vec<usize> = h.nodes().filter(|&v| terms[v]).collect();
    let dist = if src.is_empty() { vec![None; n] } else { exact_distances(g, &hb, &src, Delays::Rat(inp.del)) };
    let mut clusters: Vec<Cluster> = term_of
        .iter()
        .map(|&t| Cluster { terminal: t, nodes: Vec::new(), radius: Q::zero() })
        .collect();
    for v in h.nodes() {
        let c = comp[v] as usize;
        if clusters[c].terminal == usize::MAX {
            return Err(ClusterError::Invariant { phase: g.b(), msg: format!("node {} lies in a component without a terminal", v) });
        }
        let dv = dist[v].clone().expect("terminal in component");
        if dv > clusters[c].radius {
            clusters[c].radius = dv;
        }
        clusters[c].nodes.push(v);
    }
    // components come out in first-node order already
    let mut cluster_of = vec![NONE; n];
    for v in h.nodes() {
        cluster_of[v] = comp[v];
    }
    if check == SelfCheck::Full {
        let d0 = exact_distances(g, h, &(0..n).filter(|&v| h.node[v] && inp.q[v]).collect::<Vec<_>>(), Delays::Rat(inp.del));
        for v in h.nodes() {
            let bound = &a_tot * d0[v].clone().unwrap() + &b_tot;
            if dist[v].as_ref().unwrap() > &bound {
                return Err(ClusterError::Invariant { phase: g.b(), msg: format!("ruling bound fails at node {}", v) });
            }
        }
    }
    let bad = (0..n).map(|v| h.node[v] && !good[v]).collect();
    Ok(TerminalClustering { clusters, cluster_of, terminals: terms, good, bad, edges, a_tot, b_tot, phases })
}

fn separation_invariant(g: &Graph, h: &Subgraph, edges: &[bool], terms: &[bool], i: u32) -> Result<(), String> {
    let sub = Subgraph { node: h.node.clone(), edge: edges.to_vec() };
    let (comp, k) = components(g, &sub);
    let mut prefix: Vec<Option<u64>> = vec![None; k];
    let shift = g.b() - i;
    for v in h.nodes() {
        if terms[v] {
            let p = g.id(v) >> shift;
            let c = comp[v] as usize;
            match prefix[c] {
                None => prefix[c] = Some(p),
                Some(x) if x != p => return Err(format!("terminals disagree on the first {} bits at node {}", i, v)),
                _ => {}
            }
        }
    }
    Ok(())
}
