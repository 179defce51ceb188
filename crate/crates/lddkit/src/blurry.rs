//! Blurry ball growing: the exact-distance reference version and the general
//! deterministic/randomized recursion, plus the edge version via subdivision.

use num_traits::One;

use crate::graph::{dist_from, dist_from_set, Graph, Subgraph};
use crate::oracles::{Delays, Oracles};
use crate::params::{Choice, Coins, SelfCheck};
use crate::rational::{floor_i128, qi, qu, Q};

/// One recursion level of the blur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlurLevel {
    pub d: Q,
    /// 1: keep S, 2: grow to S^big
    pub branch: u8,
    pub phi1: i128,
    pub phi2: i128,
    pub dist_calls: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlurResult {
    pub s_sup: Vec<bool>,
    pub bad: Vec<bool>,
    pub trace: Vec<BlurLevel>,
}

/// Reference version with exact distances: halve D, flip a coin, keep S or grow it.
pub fn exact_blur(g: &Graph, s: &[bool], d: &Q, coins: &mut dyn Coins) -> Vec<bool> {
    let mut cur = s.to_vec();
    let mut d = d.clone();
    while d > Q::one() {
        let half = &d / qi(2);
        if !coins.flip() {
            let cap = floor_i128(&half);
            let dist = dist_from_set(g, None, &cur, Some(cap));
            cur = dist.iter().map(|x| x.is_some()).collect();
        }
        d = half;
    }
    cur
}

fn le_scaled(x: i128, factor: &Q, r: u64) -> bool {
    // x <= factor * r
    qi(x) <= factor * qu(r)
}

/// r <= D/10
fn small_radius(r: u64, d: &Q) -> bool {
    qi(10 * r as i128) <= *d
}

/// Valid-input check: every v outside `middle` is very close or very far.
pub fn is_valid_input(
    g: &Graph,
    sub: &Subgraph,
    s: &[bool],
    d: &Q,
    middle: &[bool],
    r: &[u64],
    eps: &Q,
) -> Result<(), usize> {
    let ds = dist_from_set(g, Some(sub), s, None);
    let one_eps = Q::one() + eps;
    for v in sub.nodes() {
        if middle[v] {
            continue;
        }
        let rad = &one_eps * qu(r[v]);
        if let Some(x) = ds[v] {
            if qi(x) <= rad {
                continue;
            }
        }
        let ball = dist_from(g, Some(sub), v, Some(floor_i128(&rad)));
        let far = ball.iter().enumerate().any(|(u, bu)| {
            bu.is_some() && match ds[u] {
                None => true,
                Some(x) => qi(x) >= *d,
            }
        });
        if !far {
            return Err(v);
        }
    }
    Ok(())
}

/// Nodes of `sub` at distance 0 from `s`.
fn zero_closure(g: &Graph, sub: &Subgraph, s: &[bool]) -> Vec<bool> {
    let mask: Vec<bool> = (0..g.n()).map(|v| s[v] && sub.node[v]).collect();
    dist_from_set(g, Some(sub), &mask, Some(0)).iter().map(|x| x.is_some()).collect()
}

/// The blur recursion on subgraph `sub`: r are preferred radii, mu weights.
/// Initial call uses unsafe = {r > 0}, middle = alive nodes.
#[allow(clippy::too_many_arguments)]
pub fn blur(
    o: &Oracles,
    g: &Graph,
    sub: &Subgraph,
    s: &[bool],
    r: &[u64],
    mu: &[u64],
    d: &Q,
    eps: &Q,
    mut choice: Choice,
    check: SelfCheck,
) -> BlurResult {
    let n = g.n();
    if !sub.nodes().any(|v| s[v]) {
        return BlurResult { s_sup: vec![false; n], bad: vec![false; n], trace: Vec::new() };
    }
    let mut cur = zero_closure(g, sub, s);
    let mut unsafe_: Vec<bool> = (0..n).map(|v| sub.node[v] && r[v] > 0).collect();
    let mut middle: Vec<bool> = sub.node.clone();
    let mut d = d.clone();
    let mut trace = Vec::new();
    let one_eps = Q::one() + eps;
    let two = qi(2);
    while d > Q::one() {
        if check == SelfCheck::Full {
            if let Err(v) = is_valid_input(g, sub, &cur, &d, &middle, r, eps) {
                panic!("blur: input at D = {} is not valid at node {}", d, v);
            }
        }
        let mut calls = 0;
        let src: Vec<usize> = (0..n).filter(|&v| cur[v]).collect();
        let ts = o.dist(g, sub, &src, Delays::Zero, &(&d / &two), eps).expect("S is nonempty");
        calls += 1;
        // closing under zero-length paths keeps S^big between the two balls
        let big = zero_closure(g, sub, &ts.member);
        let big_src: Vec<usize> = (0..n).filter(|&v| big[v]).collect();
        let tb = o.dist(g, sub, &big_src, Delays::Zero, &d, eps).expect("S^big is nonempty");
        calls += 1;
        let comp_src: Vec<usize> = sub.nodes().filter(|&v| !big[v]).collect();
        let tc = if comp_src.is_empty() {
            None
        } else {
            calls += 1;
            Some(o.dist(g, sub, &comp_src, Delays::Zero, &d, eps).expect("complement is nonempty"))
        };
        let escape = |v: usize| !small_radius(r[v], &d);
        let mut u1 = vec![false; n];
        let mut u2 = vec![false; n];
        for v in sub.nodes() {
            if !unsafe_[v] {
                continue;
            }
            u1[v] = escape(v) || (tb.member[v] && le_scaled(tb.df[v], &one_eps, r[v]));
            u2[v] = escape(v) || tc.as_ref().is_some_and(|t| t.member[v] && le_scaled(t.df[v], &one_eps, r[v]));
        }
        for v in sub.nodes() {
            if u1[v] && u2[v] && !escape(v) {
                middle[v] = false;
            }
        }
        let phi = |u: &[bool]| -> i128 {
            sub.nodes()
                .filter(|&v| u[v] && !escape(v))
                .map(|v| (1 + middle[v] as i128) * mu[v] as i128 * r[v] as i128)
                .sum()
        };
        let (phi1, phi2) = (phi(&u1), phi(&u2));
        let first = match &mut choice {
            Choice::Det => phi1 <= phi2,
            Choice::Rand(c) => c.flip(),
        };
        trace.push(BlurLevel { d: d.clone(), branch: if first { 1 } else { 2 }, phi1, phi2, dist_calls: calls });
        if first {
            unsafe_ = u1;
        } else {
            cur = big;
            unsafe_ = u2;
        }
        d = (Q::one() - eps) * d / &two;
    }
    BlurResult { s_sup: cur, bad: unsafe_, trace }
}

/// Default blur precision for a graph with n nodes.
pub fn default_eps(n: usize) -> Q {
    crate::params::eps_blur(n)
}

/// Budget 10 / (D (1-eps)^e) * sum mu r with e = max(0, floor(log2 2D)).
pub fn det_budget(d: &Q, eps: &Q, mu: &[u64], r: &[u64], alive: &[bool]) -> Q {
    let e = crate::rational::blur_exponent(d);
    let total: i128 = (0..mu.len()).filter(|&v| alive[v]).map(|v| mu[v] as i128 * r[v] as i128).sum();
    qi(10) * crate::rational::inv_one_minus_pow(eps, e) * qi(total) / d
}

/// Per-node bound 20 r(v) / (D (1-eps)^e).
pub fn rand_bound(d: &Q, eps: &Q, r: u64) -> Q {
    let e = crate::rational::blur_exponent(d);
    qi(20) * qu(r) * crate::rational::inv_one_minus_pow(eps, e) / d
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeBlurResult {
    pub s_sup: Vec<bool>,
    pub cut: Vec<usize>,
    /// blur output on the subdivided graph
    pub inner: BlurResult,
    pub sub_graph: Graph,
}

/// Edge version: subdivide, give v_e radius len(e) and weight mu(e), blur, map back.
/// Only nodes and edges alive in `sub` take part; `cut` lists alive edges leaving S_sup.
pub fn blurry_edge(
    o: &Oracles,
    g: &Graph,
    sub: &Subgraph,
    s: &[bool],
    mu_e: &[u64],
    d: &Q,
    eps: &Q,
    choice: Choice,
    check: SelfCheck,
) -> EdgeBlurResult {
    let (h, map) = g.subdivide();
    let mut r = vec![0u64; h.n()];
    let mut mu = vec![0u64; h.n()];
    for (k, &ve) in map.iter().enumerate() {
        r[ve] = g.edge(k).len;
        mu[ve] = mu_e[k];
    }
    let mut alive = sub.node.clone();
    alive.extend((0..g.m()).map(|k| sub.edge_alive(g, k)));
    let mut s2: Vec<bool> = (0..g.n()).map(|v| s[v] && sub.node[v]).collect();
    s2.resize(h.n(), false);
    let res = blur(o, &h, &Subgraph::induced(&h, &alive), &s2, &r, &mu, d, eps, choice, check);
    let s_sup: Vec<bool> = res.s_sup[..g.n()].to_vec();
    let cut = (0..g.m()).filter(|&k| sub.edge_alive(g, k) && s_sup[g.edge(k).u] != s_sup[g.edge(k).v]).collect();
    EdgeBlurResult { s_sup, cut, inner: res, sub_graph: h }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{FixedCoins, RngCoins};
    use crate::rational::q;

    #[test]
    fn exact_blur_small_d_returns_s() {
        let g = Graph::new(2, &[(0, 1, 1)]).unwrap();
        let mut c = RngCoins::new(3);
        assert_eq!(exact_blur(&g, &[true, false], &qi(1), &mut c), vec![true, false]);
    }

    #[test]
    fn exact_blur_sole_neighbor_at_two_thirds() {
        // D = 12, l = 8: v is never within D/2^k / 2
        let g = Graph::new(2, &[(0, 1, 8)]).unwrap();
        for mask in 0..16u64 {
            let mut c = FixedCoins::from_mask(mask, 4);
            assert!(!exact_blur(&g, &[true, false], &qi(12), &mut c)[1]);
        }
    }

    #[test]
    fn zero_radii_no_bad() {
        let g = Graph::new(3, &[(0, 1, 3), (1, 2, 3)]).unwrap();
        let o = Oracles::default();
        let res = blur(&o, &g, &Subgraph::full(&g), &[true, false, false], &[0; 3], &[1; 3], &qi(8), &q(1, 10), Choice::Det, SelfCheck::Full);
        assert!(res.bad.iter().all(|&b| !b));
        assert!(res.s_sup[0]);
    }

    #[test]
    fn all_sources() {
        let g = Graph::new(3, &[(0, 1, 3), (1, 2, 3)]).unwrap();
        let o = Oracles::default();
        let res = blur(&o, &g, &Subgraph::full(&g), &[true; 3], &[1; 3], &[1; 3], &qi(8), &q(1, 10), Choice::Det, SelfCheck::Full);
        assert_eq!(res.s_sup, vec![true; 3]);
        // complement is empty so each level makes two oracle calls
        assert!(res.trace.iter().all(|l| l.dist_calls == 2));
    }

    #[test]
    fn empty_source_set() {
        let g = Graph::new(2, &[(0, 1, 1)]).unwrap();
        let o = Oracles::default();
        let res = blur(&o, &g, &Subgraph::full(&g), &[false; 2], &[1; 2], &[1; 2], &qi(8), &q(1, 10), Choice::Det, SelfCheck::Off);
        assert_eq!(res.s_sup, vec![false; 2]);
        assert_eq!(o.stats().dist_calls, 0);
    }

    #[test]
    fn edge_inside_s_not_cut() {
        let g = Graph::new(2, &[(0, 1, 5)]).unwrap();
        let o = Oracles::default();
        let res = blurry_edge(&o, &g, &Subgraph::full(&g), &[true, true], &[1], &qi(10), &q(1, 10), Choice::Det, SelfCheck::Fast);
        assert!(res.cut.is_empty());
    }

    #[test]
    fn zero_length_edges_never_cut() {
        let g = Graph::new(4, &[(0, 1, 0), (1, 2, 3), (2, 3, 0)]).unwrap();
        let o = Oracles::default();
        for seed in 0..20 {
            let mut c = RngCoins::new(seed);
            let res = blurry_edge(&o, &g, &Subgraph::full(&g), &[true, false, false, false], &[1, 1, 1], &qi(6), &q(1, 10), Choice::Rand(&mut c), SelfCheck::Fast);
            assert!(!res.cut.contains(&0) && !res.cut.contains(&2));
        }
    }

    #[test]
    fn budget_values() {
        // D = 4: e = 3, 10/(4 * (9/10)^3) * 2
        let b = det_budget(&qi(4), &q(1, 10), &[1, 1], &[1, 1], &[true, true]);
        assert_eq!(b, qi(20) / (qi(4) * q(729, 1000)));
    }
}
