//! Red/blue splitting of a terminal set, the building block of the phase loop.

use num_traits::{One, Zero};

use super::ClusterError;
use crate::blurry::blur;
use crate::graph::{Graph, Subgraph};
use crate::oracles::{exact_distances, Delays, Oracles};
use crate::params::{Choice, SelfCheck};
use crate::rational::{pow, qi, Q};

pub struct RbInput<'a> {
    pub h: &'a Subgraph,
    pub r: &'a [u64],
    pub mu: &'a [u64],
    pub q_red: &'a [bool],
    pub q_blue: &'a [bool],
    /// delays, read on terminals only
    pub del: &'a [Q],
    /// every v has d_{H,del}(Q,v) <= ruling
    pub ruling: Q,
    pub d: Q,
    pub eps: Q,
    /// recursion depth; required for coin-driven runs, derived from the weights otherwise
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RbOutput {
    pub q_red: Vec<bool>,
    pub q_blue: Vec<bool>,
    /// surviving edges of H'; V(H') = V(H)
    pub edges: Vec<bool>,
    pub bad: Vec<bool>,
    pub depth: u32,
}

pub fn sum_mu_r(sub: &Subgraph, r: &[u64], mu: &[u64]) -> i128 {
    sub.nodes().map(|v| mu[v] as i128 * r[v] as i128).sum()
}

/// 1 + floor(log2 s) for s > 0, else 0.
pub fn det_depth(s: i128) -> u32 {
    if s > 0 {
        128 - s.leading_zeros()
    } else {
        0
    }
}

/// Coefficients (A, B) of the ruling bound A d + B for depth i.
pub fn ruling_coeffs(i: u32, eps: &Q, d: &Q) -> (Q, Q) {
    let base = pow(&(Q::one() + eps), 2);
    let a = pow(&base, i + 1);
    let mut b = Q::zero();
    let mut p = Q::one();
    for _ in 1..=i {
        p *= &base;
        b += &p;
    }
    (a, b * qi(3) * d)
}

pub fn rb_split(o: &Oracles, g: &Graph, inp: &RbInput, mut choice: Choice, check: SelfCheck) -> Result<RbOutput, ClusterError> {
    let depth = match (&choice, inp.depth) {
        (Choice::Det, _) => det_depth(sum_mu_r(inp.h, inp.r, inp.mu)),
        (Choice::Rand(_), Some(i)) => i,
        (Choice::Rand(_), None) => return Err(ClusterError::MissingDepth),
    };
    let ctx = Ctx { o, g, r: inp.r, mu: inp.mu, d: &inp.d, eps: &inp.eps, check };
    let (q_red, q_blue, edges, bad) = ctx.rec(
        inp.h.clone(),
        depth,
        inp.q_red.to_vec(),
        inp.q_blue.to_vec(),
        inp.del.to_vec(),
        inp.ruling.clone(),
        &mut choice,
    )?;
    Ok(RbOutput { q_red, q_blue, edges, bad, depth })
}

struct Ctx<'a> {
    o: &'a Oracles,
    g: &'a Graph,
    r: &'a [u64],
    mu: &'a [u64],
    d: &'a Q,
    eps: &'a Q,
    check: SelfCheck,
}

type Parts = (Vec<bool>, Vec<bool>, Vec<bool>, Vec<bool>);

impl<'a> Ctx<'a> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        &self,
        h: Subgraph,
        i: u32,
        qr: Vec<bool>,
        qb: Vec<bool>,
        del: Vec<Q>,
        ruling: Q,
        choice: &mut Choice,
    ) -> Result<Parts, ClusterError> {
        let g = self.g;
        let n = g.n();
        if h.node_count() == 0 {
            return Ok((vec![false; n], vec![false; n], vec![false; g.m()], vec![false; n]));
        }
        let src: Vec<usize> = h.nodes().filter(|&v| qr[v] || qb[v]).collect();
        if self.check == SelfCheck::Full {
            let ex = exact_distances(g, &h, &src, Delays::Rat(&del));
            for v in h.nodes() {
                if !ex[v].as_ref().is_some_and(|x| *x <= ruling) {
                    return Err(ClusterError::Ruling { node: v });
                }
            }
        }
        let f = self.o.dist(g, &h, &src, Delays::Rat(&del), &ruling, self.eps).map_err(|_| ClusterError::NoTerminals)?;
        if let Some(v) = h.nodes().find(|&v| !f.member[v]) {
            return Err(ClusterError::Ruling { node: v });
        }
        let red_tree: Vec<bool> = (0..n).map(|v| f.member[v] && qr[f.root[v] as usize]).collect();

        if i == 0 {
            let mut edges = h.edge.clone();
            for (k, e) in g.edges().iter().enumerate() {
                if edges[k] && h.edge_alive(g, k) && red_tree[e.u] != red_tree[e.v] {
                    edges[k] = false;
                }
            }
            let q_red = (0..n).map(|v| qr[v] && red_tree[v] && h.node[v]).collect();
            let q_blue = (0..n).map(|v| qb[v] && !red_tree[v] && h.node[v]).collect();
            let bad = (0..n).map(|v| h.node[v] && self.r[v] > 0).collect();
            return Ok((q_red, q_blue, edges, bad));
        }

        let weight = |side: bool| -> i128 {
            h.nodes().filter(|&v| red_tree[v] == side).map(|v| self.mu[v] as i128 * self.r[v] as i128).sum()
        };
        let red_step = match choice {
            Choice::Det => weight(true) >= weight(false),
            Choice::Rand(c) => c.flip(),
        };
        let in_a: Vec<bool> = (0..n).map(|v| h.node[v] && red_tree[v] == red_step).collect();
        let bl = blur(self.o, g, &h, &in_a, self.r, self.mu, self.d, self.eps, choice.reborrow(), self.check);
        let w = bl.s_sup;
        let keep: Vec<bool> = (0..n).map(|v| h.node[v] && !w[v]).collect();
        let h_rec = h.restrict(g, &keep);

        let one_eps = Q::one() + self.eps;
        let three_d = qi(3) * self.d;
        let mut qa_rec = vec![false; n];
        let mut qabar_rec = vec![false; n];
        let mut del_rec = vec![Q::zero(); n];
        for v in h_rec.nodes() {
            let hit = match f.parent_of(v) {
                Some(p) => {
                    if w[p] {
                        qa_rec[v] = true;
                        true
                    } else {
                        false
                    }
                }
                None => {
                    qabar_rec[v] = true;
                    true
                }
            };
            if hit {
                let root = f.root[v] as usize;
                del_rec[v] = &one_eps * (&del[root] + qi(f.df[v])) + &three_d;
            }
        }
        let ruling_rec = pow(&one_eps, 2) * &ruling + &three_d;
        let i_rec = match choice {
            Choice::Det => det_depth(sum_mu_r(&h_rec, self.r, self.mu)),
            Choice::Rand(_) => i - 1,
        };
        debug_assert!(i_rec < i);
        let (qr_rec, qb_rec) = if red_step { (qa_rec, qabar_rec) } else { (qabar_rec, qa_rec) };
        let (qr_out, qb_out, mut edges, mut bad) = self.rec(h_rec, i_rec, qr_rec, qb_rec, del_rec, ruling_rec, choice)?;

        // Q'^A = Q^A on the A side of the forest; Q'^Abar comes from the recursion
        let (qa, qa_out_rec) = if red_step { (&qr, &qr_out) } else { (&qb, &qb_out) };
        let qa_out: Vec<bool> = (0..n).map(|v| qa[v] && in_a[v]).collect();
        for (k, e) in g.edges().iter().enumerate() {
            if h.edge_alive(g, k) && w[e.u] && w[e.v] {
                edges[k] = true;
            }
        }
        for v in 0..n {
            if qa_out_rec[v] {
                edges[f.parent_edge[v] as usize] = true;
            }
            if bl.bad[v] {
                bad[v] = true;
            }
        }
        let (q_red, q_blue) = if red_step { (qa_out, qb_out) } else { (qr_out, qa_out) };
        Ok((q_red, q_blue, edges, bad))
    }
}
