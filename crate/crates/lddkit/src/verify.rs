//! Independent checkers. Each one recomputes what it needs with its own
//! Dijkstra and never reads producer-internal distance data. A failure carries
//! a witness.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::embed::{make_code, Embedding, Labeling};
use crate::graph::{Graph, Subgraph, NONE};
use crate::lsst::{Part, StarDecomposition};
use crate::oracles::RootedForest;
use crate::rational::{pow, qi, qu, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.witness)
    }
}

impl std::error::Error for Violation {}

pub type Verdict<T = ()> = Result<T, Violation>;

fn fail<T>(check: &'static str, witness: String) -> Verdict<T> {
    Err(Violation { check, witness })
}

/// Integer Dijkstra over the allowed nodes and edges, truncated at `cap`.
pub fn sp(g: &Graph, node_ok: &[bool], edge_ok: Option<&[bool]>, sources: &[usize], cap: Option<i128>) -> Vec<Option<i128>> {
    let mut d: Vec<Option<i128>> = vec![None; g.n()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if node_ok[s] && d[s].is_none() {
            d[s] = Some(0);
            heap.push(Reverse((0i128, s)));
        }
    }
    while let Some(Reverse((du, u))) = heap.pop() {
        if d[u] != Some(du) {
            continue;
        }
        for &(w, e) in g.adj(u) {
            let (w, e) = (w as usize, e as usize);
            if !node_ok[w] || edge_ok.is_some_and(|m| !m[e]) {
                continue;
            }
            let nd = du + g.edge(e).len as i128;
            if cap.is_some_and(|c| nd > c) {
                continue;
            }
            if d[w].is_none_or(|x| nd < x) {
                d[w] = Some(nd);
                heap.push(Reverse((nd, w)));
            }
        }
    }
    d
}

/// Delayed distances min_q del(q) + d(q, v) with rational delays.
pub fn sp_delayed(g: &Graph, node_ok: &[bool], edge_ok: Option<&[bool]>, sources: &[(usize, Q)]) -> Vec<Option<Q>> {
    let mut d: Vec<Option<Q>> = vec![None; g.n()];
    let mut heap = BinaryHeap::new();
    for (s, del) in sources {
        if node_ok[*s] && d[*s].as_ref().is_none_or(|x| del < x) {
            d[*s] = Some(del.clone());
            heap.push(Reverse((del.clone(), *s)));
        }
    }
    while let Some(Reverse((du, u))) = heap.pop() {
        if d[u].as_ref() != Some(&du) {
            continue;
        }
        for &(w, e) in g.adj(u) {
            let (w, e) = (w as usize, e as usize);
            if !node_ok[w] || edge_ok.is_some_and(|m| !m[e]) {
                continue;
            }
            let nd = &du + qu(g.edge(e).len);
            if d[w].as_ref().is_none_or(|x| nd < *x) {
                d[w] = Some(nd.clone());
                heap.push(Reverse((nd, w)));
            }
        }
    }
    d
}

fn mask_of(n: usize, nodes: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in nodes {
        m[v] = true;
    }
    m
}

/// Each cluster is node-disjoint; optionally with a center.
#[derive(Debug, Clone, Default)]
pub struct ClusterSpec {
    /// min distance in G between distinct clusters
    pub separation: Option<i128>,
    /// strong diameter bound
    pub diameter: Option<Q>,
    /// strong radius bound from the given centers
    pub radius: Option<Q>,
    pub min_covered: Option<usize>,
}

pub fn check_clustering(g: &Graph, clusters: &[Vec<usize>], centers: Option<&[usize]>, spec: &ClusterSpec) -> Verdict {
    let n = g.n();
    let mut owner = vec![NONE; n];
    for (i, c) in clusters.iter().enumerate() {
        for &v in c {
            if v >= n {
                return fail("clustering", format!("cluster {} names unknown node {}", i, v));
            }
            if owner[v] != NONE {
                return fail("clustering", format!("node {} lies in clusters {} and {}", v, owner[v], i));
            }
            owner[v] = i as u32;
        }
    }
    let covered = owner.iter().filter(|&&o| o != NONE).count();
    if let Some(k) = spec.min_covered {
        if covered < k {
            return fail("coverage", format!("{} nodes clustered, need {}", covered, k));
        }
    }
    if let Some(s) = spec.separation {
        let all = vec![true; n];
        for (i, c) in clusters.iter().enumerate() {
            let d = sp(g, &all, None, c, Some(s - 1));
            for v in 0..n {
                if d[v].is_some() && owner[v] != NONE && owner[v] != i as u32 {
                    return fail("separation", format!("clusters {} and {} within distance {} (node {})", i, owner[v], d[v].unwrap(), v));
                }
            }
        }
    }
    for (i, c) in clusters.iter().enumerate() {
        let inside = mask_of(n, c);
        if let (Some(bound), Some(cs)) = (&spec.radius, centers) {
            let d = sp(g, &inside, None, &[cs[i]], None);
            for &v in c {
                match d[v] {
                    Some(x) if qi(x) <= *bound => {}
                    other => return fail("radius", format!("cluster {} center {} node {}: {:?} > {}", i, cs[i], v, other, bound)),
                }
            }
        }
        if let Some(bound) = &spec.diameter {
            for &u in c {
                let d = sp(g, &inside, None, &[u], None);
                for &v in c {
                    match d[v] {
                        Some(x) if qi(x) <= *bound => {}
                        other => return fail("diameter", format!("cluster {} pair ({}, {}): {:?} > {}", i, u, v, other, bound)),
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exact weight of the chosen items against a rational budget.
pub fn check_cut_budget(weights: &[u64], chosen: &[bool], budget: &Q) -> Verdict<Q> {
    let total: u128 = weights.iter().zip(chosen).filter(|(_, &c)| c).map(|(&w, _)| w as u128).sum();
    let w = Q::from_integer(BigInt::from(total));
    if w > *budget {
        return fail("budget", format!("weight {} > budget {}", w, budget));
    }
    Ok(w)
}

/// Blur output: S within S_sup, S_sup not too far, and every good node's ball
/// fully inside or fully outside S_sup.
#[allow(clippy::too_many_arguments)]
pub fn check_blur(g: &Graph, sub: &Subgraph, s: &[bool], s_sup: &[bool], bad: &[bool], r: &[u64], d: &Q) -> Verdict {
    let n = g.n();
    for v in 0..n {
        if sub.node[v] && s[v] && !s_sup[v] {
            return fail("blur", format!("source {} missing from S_sup", v));
        }
    }
    let inner: Vec<bool> = (0..n).map(|v| sub.node[v] && s_sup[v]).collect();
    let src: Vec<usize> = (0..n).filter(|&v| sub.node[v] && s[v]).collect();
    let dist = sp(g, &inner, Some(&sub.edge), &src, None);
    for v in 0..n {
        if inner[v] && !dist[v].is_some_and(|x| qi(x) <= *d) {
            return fail("not-too-far", format!("d_G[S_sup](S, {}) = {:?} > {}", v, dist[v], d));
        }
    }
    for v in 0..n {
        if !sub.node[v] || bad[v] {
            continue;
        }
        let ball = sp(g, &sub.node, Some(&sub.edge), &[v], Some(r[v] as i128));
        let mixed = (0..n).any(|u| ball[u].is_some() && s_sup[u] != s_sup[v]);
        if mixed {
            return fail("good", format!("ball B({}, {}) straddles S_sup", v, r[v]));
        }
    }
    Ok(())
}

/// max(0, floor(log2 2D)) for D > 0.
pub fn budget_exponent(d: &Q) -> u32 {
    let two_d = qi(2) * d;
    let mut e = 0u32;
    let mut p = Q::one();
    while &p * qi(2) <= two_d {
        p *= qi(2);
        e += 1;
    }
    e
}

/// 10 / (D (1-eps)^e) * sum mu r.
pub fn det_blur_budget(d: &Q, eps: &Q, mu: &[u64], r: &[u64], alive: &[bool]) -> Q {
    let s: i128 = (0..mu.len()).filter(|&v| alive[v]).map(|v| mu[v] as i128 * r[v] as i128).sum();
    qi(10) * qi(s) / (d * pow(&(Q::one() - eps), budget_exponent(d)))
}

/// Per-node randomized bound 20 r / (D (1-eps)^e).
pub fn rand_blur_bound(d: &Q, eps: &Q, r: u64) -> Q {
    qi(20) * qu(r) / (d * pow(&(Q::one() - eps), budget_exponent(d)))
}

/// A split instance as plain data.
pub struct SplitInstance<'a> {
    pub h: &'a Subgraph,
    pub r: &'a [u64],
    pub mu: &'a [u64],
    pub q_red: &'a [bool],
    pub q_blue: &'a [bool],
    pub del: &'a [Q],
    pub d: &'a Q,
    pub eps: &'a Q,
}

pub struct SplitOutput<'a> {
    pub q_red: &'a [bool],
    pub q_blue: &'a [bool],
    pub edges: &'a [bool],
    pub bad: &'a [bool],
    pub depth: u32,
}

fn components_of(g: &Graph, node: &[bool], edge: &[bool]) -> Vec<u32> {
    let mut comp = vec![NONE; g.n()];
    let mut k = 0;
    for s in 0..g.n() {
        if !node[s] || comp[s] != NONE {
            continue;
        }
        comp[s] = k;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &(w, e) in g.adj(u) {
                let (w, e) = (w as usize, e as usize);
                if node[w] && edge[e] && comp[w] == NONE {
                    comp[w] = k;
                    q.push_back(w);
                }
            }
        }
        k += 1;
    }
    comp
}

/// Separation, ruling, good and (deterministic) bad properties of a split.
pub fn check_split(g: &Graph, inp: &SplitInstance, out: &SplitOutput, deterministic: bool) -> Verdict {
    let n = g.n();
    let h = inp.h;
    let edges_h: Vec<bool> = (0..g.m()).map(|e| h.edge_alive(g, e)).collect();
    for e in 0..g.m() {
        if out.edges[e] && !edges_h[e] {
            return fail("split", format!("output edge {} is not in H", e));
        }
    }
    for v in 0..n {
        if (out.q_red[v] && !inp.q_red[v]) || (out.q_blue[v] && !inp.q_blue[v]) {
            return fail("split", format!("terminal {} was not an input terminal of that color", v));
        }
    }
    let comp = components_of(g, &h.node, out.edges);
    let mut has_red = vec![false; n];
    for v in 0..n {
        if h.node[v] && out.q_red[v] {
            has_red[comp[v] as usize] = true;
        }
    }
    for v in 0..n {
        if h.node[v] && out.q_blue[v] && has_red[comp[v] as usize] {
            return fail("separation", format!("blue terminal {} shares a component with a red one", v));
        }
    }
    let one_eps2 = pow(&(Q::one() + inp.eps), 2);
    let i = out.depth;
    let a = pow(&one_eps2, i + 1);
    let mut b = Q::zero();
    for j in 1..=i {
        b += pow(&one_eps2, j);
    }
    b *= qi(3) * inp.d;
    let src_in: Vec<(usize, Q)> = (0..n).filter(|&v| h.node[v] && (inp.q_red[v] || inp.q_blue[v])).map(|v| (v, inp.del[v].clone())).collect();
    let src_out: Vec<(usize, Q)> = (0..n).filter(|&v| h.node[v] && (out.q_red[v] || out.q_blue[v])).map(|v| (v, inp.del[v].clone())).collect();
    let before = sp_delayed(g, &h.node, Some(&edges_h), &src_in);
    let after = sp_delayed(g, &h.node, Some(out.edges), &src_out);
    for v in 0..n {
        if !h.node[v] {
            continue;
        }
        let bound = &a * before[v].clone().unwrap_or_else(Q::zero) + &b;
        match &after[v] {
            Some(x) if *x <= bound => {}
            other => return fail("ruling", format!("node {}: {:?} > {}", v, other.as_ref().map(|x| x.to_string()), bound)),
        }
    }
    for v in 0..n {
        if !h.node[v] || out.bad[v] {
            continue;
        }
        let cap = Some(inp.r[v] as i128);
        let b0 = sp(g, &h.node, Some(&edges_h), &[v], cap);
        let b1 = sp(g, &h.node, Some(out.edges), &[v], cap);
        if (0..n).any(|u| b0[u].is_some() != b1[u].is_some()) {
            return fail("good", format!("ball of {} with radius {} changed", v, inp.r[v]));
        }
    }
    if deterministic && !inp.d.is_zero() {
        let s: i128 = (0..n).filter(|&v| h.node[v]).map(|v| inp.mu[v] as i128 * inp.r[v] as i128).sum();
        let c_bad = qi(20) / pow(&(Q::one() - inp.eps), budget_exponent(inp.d));
        let budget = (Q::one() - Q::new(BigInt::one(), BigInt::from(2u8).pow(i))) * c_bad * qi(s) / inp.d;
        let alive_bad: Vec<bool> = (0..n).map(|v| h.node[v] && out.bad[v]).collect();
        check_cut_budget(inp.mu, &alive_bad, &budget).map_err(|v| Violation { check: "bad", witness: v.witness })?;
    }
    Ok(())
}

/// Every node of each part padded or not: B(v, D) inside its cluster.
pub fn padded_flags(g: &Graph, cluster_of: &[u32], d: &Q) -> Vec<bool> {
    let all = vec![true; g.n()];
    let cap = crate::rational::floor_i128(d);
    (0..g.n())
        .map(|v| {
            let ball = sp(g, &all, None, &[v], Some(cap));
            (0..g.n()).all(|u| ball[u].is_none() || cluster_of[u] == cluster_of[v])
        })
        .collect()
}

/// Every node padded in at least `need` of the partitions.
pub fn check_cover(g: &Graph, partitions: &[Vec<u32>], d: u64, need: usize) -> Verdict<Vec<usize>> {
    let mut count = vec![0usize; g.n()];
    for p in partitions {
        if p.iter().any(|&c| c == NONE) {
            return fail("cover", "partition leaves a node unassigned".into());
        }
        for (v, ok) in padded_flags(g, p, &qu(d)).into_iter().enumerate() {
            count[v] += ok as usize;
        }
    }
    if let Some(v) = (0..g.n()).find(|&v| count[v] < need) {
        return fail("cover", format!("node {} padded in {} < {} partitions", v, count[v], need));
    }
    Ok(count)
}

/// Distance oracle contract, against exact distances.
pub fn check_dist_forest(g: &Graph, sub: &Subgraph, sources: &[usize], del: &[Q], d: &Q, eps: &Q, f: &RootedForest) -> Verdict {
    let n = g.n();
    let is_src = mask_of(n, sources);
    let src: Vec<(usize, Q)> = sources.iter().map(|&s| (s, del[s].clone())).collect();
    let exact = sp_delayed(g, &sub.node, Some(&sub.edge), &src);
    let one_eps = Q::one() + eps;
    for v in 0..n {
        if !f.member[v] {
            if exact[v].as_ref().is_some_and(|x| x <= d) {
                return fail("dist property 2", format!("node {} at distance {} <= D missing", v, exact[v].as_ref().unwrap()));
            }
            continue;
        }
        if !sub.node[v] {
            return fail("dist forest", format!("member {} is not in H", v));
        }
        let root = f.root[v] as usize;
        if !is_src[root] {
            return fail("dist forest", format!("root {} of {} is not a source", root, v));
        }
        match f.parent_of(v) {
            None => {
                if root != v || f.df[v] != 0 {
                    return fail("dist forest", format!("root {} has a bad label", v));
                }
            }
            Some(p) => {
                let e = f.parent_edge[v] as usize;
                let ed = g.edge(e);
                if !sub.edge_alive(g, e) || ed.other(v) != p || !f.member[p] || f.root[p] as usize != root {
                    return fail("dist forest", format!("parent link of {} is not an edge of H in the same tree", v));
                }
                if f.df[v] != f.df[p] + ed.len as i128 {
                    return fail("dist forest", format!("d_F({}) inconsistent with its parent", v));
                }
            }
        }
        let lhs = &del[root] + qi(f.df[v]);
        let ex = exact[v].clone().expect("member reachable");
        if lhs > &one_eps * ex.clone() || lhs > &one_eps * d {
            return fail("dist property 1", format!("node {}: {} > (1+eps) min({}, D)", v, lhs, ex));
        }
    }
    // parent links acyclic: walking up from any member reaches its root within n steps
    for v in 0..n {
        if f.member[v] {
            let mut x = v;
            for _ in 0..=n {
                match f.parent_of(x) {
                    Some(p) => x = p,
                    None => break,
                }
            }
            if f.parent_of(x).is_some() {
                return fail("dist forest", format!("parent links from {} cycle", v));
            }
        }
    }
    Ok(())
}

/// Potential contract: zero on S, 1-Lipschitz on edges, (1+eps) phi >= d(S, .).
pub fn check_potential(g: &Graph, s: &[bool], eps: &Q, phi: &[i128]) -> Verdict {
    let n = g.n();
    let all = vec![true; n];
    let src: Vec<usize> = (0..n).filter(|&v| s[v]).collect();
    let d = sp(g, &all, None, &src, None);
    for v in 0..n {
        if s[v] && phi[v] != 0 {
            return fail("potential property 1", format!("phi({}) = {} on S", v, phi[v]));
        }
        let dv = d[v].expect("connected");
        if (Q::one() + eps) * qi(phi[v]) < qi(dv) {
            return fail("potential property 3", format!("(1+eps) phi({}) < d(S, {}) = {}", v, v, dv));
        }
    }
    for (k, e) in g.edges().iter().enumerate() {
        if (phi[e.u] - phi[e.v]).unsigned_abs() > e.len as u128 {
            return fail("potential property 2", format!("edge {}: |{} - {}| > {}", k, phi[e.u], phi[e.v], e.len));
        }
    }
    Ok(())
}

/// The three star conditions for every part.
pub fn check_star(g: &Graph, parts: &[Part], sd: &StarDecomposition) -> Verdict {
    let n = g.n();
    let one_eps = Q::one() + &sd.eps;
    for (p, st) in parts.iter().zip(&sd.stars) {
        let mut seen = vec![0u8; n];
        for &v in st.center.iter().chain(st.satellites.iter().flat_map(|s| s.nodes.iter())) {
            seen[v] += 1;
        }
        for &v in &p.nodes {
            if seen[v] != 1 {
                return fail("star", format!("node {} is covered {} times", v, seen[v]));
            }
        }
        if !st.center.contains(&p.root) {
            return fail("star", format!("root {} not in the center piece", p.root));
        }
        let dg = sp(g, &mask_of(n, &p.nodes), None, &[p.root], None);
        let d0 = sp(g, &mask_of(n, &st.center), None, &[p.root], None);
        for &v in &st.center {
            let (a, b) = (d0[v], dg[v].unwrap());
            if !a.is_some_and(|a| qi(a) <= &one_eps * qi(b)) {
                return fail("star condition 2", format!("node {}: {:?} > (1+eps) * {}", v, a, b));
            }
        }
        for sat in &st.satellites {
            let dj = sp(g, &mask_of(n, &sat.nodes), None, &[sat.root], None);
            let e = g.edge(sat.bridge);
            if e.other(sat.anchor) != sat.root || (e.u != sat.anchor && e.v != sat.anchor) {
                return fail("star", format!("bridge {} does not join {} and {}", sat.bridge, sat.anchor, sat.root));
            }
            let y = d0[sat.anchor].ok_or_else(|| Violation { check: "star", witness: format!("anchor {} outside the center", sat.anchor) })?;
            for &v in &sat.nodes {
                let x = dj[v].ok_or_else(|| Violation { check: "star condition 1", witness: format!("{} unreachable in its piece", v) })?;
                if qi(4 * x) > qi(3) * &sd.radius {
                    return fail("star condition 1", format!("node {}: {} > 3R/4 with R = {}", v, x, sd.radius));
                }
                if qi(y + e.len as i128 + x) > &one_eps * qi(dg[v].unwrap()) {
                    return fail("star condition 3", format!("node {}: {} + {} + {} > (1+eps) * {}", v, y, e.len, x, dg[v].unwrap()));
                }
            }
        }
    }
    Ok(())
}

/// F is a forest whose components are exactly the parts, with
/// d_F(r, v) <= factor * d_{G[V_i]}(r, v).
pub fn check_part_forest(g: &Graph, parts: &[Part], forest: &[usize], factor: &Q) -> Verdict {
    let n = g.n();
    let mut part_of = vec![NONE; n];
    for (i, p) in parts.iter().enumerate() {
        for &v in &p.nodes {
            part_of[v] = i as u32;
        }
    }
    let total: usize = parts.iter().map(|p| p.nodes.len()).sum();
    if forest.len() != total - parts.len() {
        return fail("forest", format!("{} edges for {} nodes in {} parts", forest.len(), total, parts.len()));
    }
    let fmask = {
        let mut m = vec![false; g.m()];
        for &e in forest {
            m[e] = true;
        }
        m
    };
    let all = vec![true; n];
    for p in parts {
        let df = sp(g, &all, Some(&fmask), &[p.root], None);
        let dg = sp(g, &mask_of(n, &p.nodes), None, &[p.root], None);
        for v in 0..n {
            let inside = part_of[v] != NONE && parts[part_of[v] as usize].root == p.root;
            if df[v].is_some() != inside {
                return fail("forest", format!("component of root {} and its part disagree at node {}", p.root, v));
            }
            if inside && qi(df[v].unwrap()) > factor * qi(dg[v].unwrap()) {
                return fail("forest stretch", format!("d_F({}, {}) = {} > {} * {}", p.root, v, df[v].unwrap(), factor, dg[v].unwrap()));
            }
        }
    }
    Ok(())
}

/// Stretch table of a spanning tree: (sum mu d_T, per-edge d_T).
pub fn check_tree_stretch(g: &Graph, tree: &[usize], mu: &[u64]) -> Verdict<(u128, Vec<i128>)> {
    let n = g.n();
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    if tree.len() != n - 1 {
        return fail("tree", format!("{} edges for {} nodes", tree.len(), n));
    }
    let fmask = {
        let mut m = vec![false; g.m()];
        for &e in tree {
            if e >= g.m() {
                return fail("tree", format!("unknown edge {}", e));
            }
            m[e] = true;
        }
        m
    };
    let all = vec![true; n];
    let mut per_edge = Vec::with_capacity(g.m());
    let mut total = 0u128;
    for (k, e) in g.edges().iter().enumerate() {
        let d = sp(g, &all, Some(&fmask), &[e.u], None);
        if k == 0 && d.iter().any(|x| x.is_none()) {
            return fail("tree", "tree does not span".into());
        }
        let dt = d[e.v].ok_or_else(|| Violation { check: "tree", witness: "tree does not span".into() })?;
        total += mu[k] as u128 * dt as u128;
        per_edge.push(dt);
    }
    if g.m() == 0 && n > 1 {
        return fail("tree", "tree does not span".into());
    }
    Ok((total, per_edge))
}

/// Minimum of sum mu d_T over all spanning trees, by enumeration; small graphs only.
pub fn brute_force_min_tree_cost(g: &Graph, mu: &[u64]) -> Option<u128> {
    let n = g.n();
    let m = g.m();
    assert!(m <= 30, "enumeration is exponential in m");
    let mut best: Option<u128> = None;
    let mut chosen = Vec::new();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    fn rec(g: &Graph, mu: &[u64], k: usize, chosen: &mut Vec<usize>, best: &mut Option<u128>) {
        let n = g.n();
        if chosen.len() + 1 == n {
            if let Ok((c, _)) = check_tree_stretch(g, chosen, mu) {
                if best.is_none_or(|b| c < b) {
                    *best = Some(c);
                }
            }
            return;
        }
        if k == g.m() || g.m() - k < n - 1 - chosen.len() {
            return;
        }
        let mut p: Vec<usize> = (0..n).collect();
        for &e in chosen.iter() {
            let (a, b) = (find(&mut p, g.edge(e).u), find(&mut p, g.edge(e).v));
            p[a] = b;
        }
        if find(&mut p, g.edge(k).u) != find(&mut p, g.edge(k).v) {
            chosen.push(k);
            rec(g, mu, k + 1, chosen, best);
            chosen.pop();
        }
        rec(g, mu, k + 1, chosen, best);
    }
    if n <= 1 {
        return Some(0);
    }
    let _ = m;
    rec(g, mu, 0, &mut chosen, &mut best);
    best
}

/// Summary of the embedding checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub pairs: usize,
    /// smallest certified ||x_u - x_v|| / d(u, v)
    pub min_certified_ratio: Option<Q>,
}

/// Coordinates recomputed from the stored partitions, per-coordinate Lipschitz
/// on every edge, and the padding lower-bound certificate for all pairs.
pub fn check_embedding(g: &Graph, emb: &Embedding, labeling: Labeling) -> Verdict<EmbeddingReport> {
    let n = g.n();
    let all = vec![true; n];
    let code = make_code(labeling, g.b()).map_err(|e| Violation { check: "embedding", witness: e.to_string() })?;
    if code.len() != emb.code_len || code.distance() != emb.code_distance {
        return fail("embedding", "code parameters differ".into());
    }
    // labels from cluster membership
    let mut labels: Vec<Vec<Vec<Vec<bool>>>> = Vec::new();
    for sc in &emb.scales {
        let mut per = Vec::new();
        for p in &sc.partitions {
            let k = p.cluster_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
            let mut min_id = vec![u64::MAX; k];
            for v in 0..n {
                min_id[p.cluster_of[v] as usize] = min_id[p.cluster_of[v] as usize].min(g.id(v));
            }
            per.push(min_id.iter().map(|&id| code.encode(id)).collect::<Vec<_>>());
        }
        labels.push(per);
    }
    for (c, pv) in emb.provenance.iter().enumerate() {
        let p = &emb.scales[pv.scale].partitions[pv.partition as usize];
        let lab = &labels[pv.scale][pv.partition as usize];
        let s: Vec<usize> = (0..n).filter(|&v| !lab[p.cluster_of[v] as usize][pv.bit as usize]).collect();
        let expect: Vec<i128> = if s.is_empty() { vec![0; n] } else { sp(g, &all, None, &s, None).into_iter().map(|x| x.expect("connected")).collect() };
        for v in 0..n {
            if emb.x[v][c] as i128 != expect[v] {
                return fail("embedding", format!("coordinate {} of node {} is {}, recomputed {}", c, v, emb.x[v][c], expect[v]));
            }
        }
        for (k, e) in g.edges().iter().enumerate() {
            if emb.x[e.u][c].abs_diff(emb.x[e.v][c]) > e.len {
                return fail("lipschitz", format!("coordinate {} on edge {}", c, k));
            }
        }
    }
    // padding per scale from balls
    let mut padded: Vec<Vec<Vec<bool>>> = Vec::new();
    for sc in &emb.scales {
        let cap = crate::rational::floor_i128(&sc.d);
        let balls: Vec<Vec<usize>> = (0..n).map(|v| sp(g, &all, None, &[v], Some(cap)).iter().enumerate().filter(|(_, x)| x.is_some()).map(|(u, _)| u).collect()).collect();
        padded.push(sc.partitions.iter().map(|p| (0..n).map(|v| balls[v].iter().all(|&u| p.cluster_of[u] == p.cluster_of[v])).collect()).collect());
    }
    let t = emb.t as usize;
    let need = t.div_ceil(3);
    let mut index = std::collections::HashMap::new();
    for (c, pv) in emb.provenance.iter().enumerate() {
        index.insert((pv.scale, pv.partition, pv.bit), c);
    }
    let mut pairs = 0;
    let mut min_ratio: Option<Q> = None;
    for u in 0..n {
        let du = sp(g, &all, None, &[u], None);
        for v in u + 1..n {
            let d = du[v].expect("connected");
            pairs += 1;
            let si = (0..emb.scales.len())
                .filter(|&i| emb.scales[i].diameter_bound < qi(d))
                .max_by(|&a, &b| emb.scales[a].d.cmp(&emb.scales[b].d))
                .ok_or_else(|| Violation { check: "certificate", witness: format!("no bracketing scale for ({}, {})", u, v) })?;
            let sc = &emb.scales[si];
            let half = &sc.d / qi(2);
            let mut good_parts = 0;
            let mut gap_sum = Q::zero();
            for (pi, p) in sc.partitions.iter().enumerate() {
                if !(padded[si][pi][u] && padded[si][pi][v]) {
                    continue;
                }
                let (cu, cv) = (p.cluster_of[u] as usize, p.cluster_of[v] as usize);
                if cu == cv {
                    return fail("certificate", format!("({}, {}) share a cluster at scale {} though d = {} exceeds the diameter bound", u, v, sc.i, d));
                }
                let (lu, lv) = (&labels[si][pi][cu], &labels[si][pi][cv]);
                let diff: Vec<usize> = (0..lu.len()).filter(|&k| lu[k] != lv[k]).collect();
                if diff.len() < emb.code_distance {
                    return fail("certificate", format!("labels of ({}, {}) differ in {} < {} bits", u, v, diff.len(), emb.code_distance));
                }
                for k in diff {
                    let c = index[&(si, pi as u32, k as u32)];
                    let gap = qu(emb.x[u][c].abs_diff(emb.x[v][c]));
                    if gap < half {
                        return fail("certificate", format!("coordinate {} gap {} < D/2 = {} for ({}, {})", c, gap, half, u, v));
                    }
                    gap_sum += gap;
                }
                good_parts += 1;
            }
            if good_parts < need {
                return fail("certificate", format!("({}, {}) both padded in {} < {} partitions at scale {}", u, v, good_parts, need, sc.i));
            }
            let ratio = gap_sum / qi(d);
            if min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                min_ratio = Some(ratio);
            }
        }
    }
    Ok(EmbeddingReport { pairs, min_certified_ratio: min_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_singletons_separated() {
        let g = Graph::new(3, &[]).unwrap();
        let cl = vec![vec![0], vec![1], vec![2]];
        assert!(check_clustering(&g, &cl, None, &ClusterSpec { separation: Some(2), ..Default::default() }).is_ok());
    }

    #[test]
    fn adjacent_singletons_fail() {
        let g = Graph::new(2, &[(0, 1, 1)]).unwrap();
        let cl = vec![vec![0], vec![1]];
        let err = check_clustering(&g, &cl, None, &ClusterSpec { separation: Some(2), ..Default::default() }).unwrap_err();
        assert_eq!(err.check, "separation");
    }

    #[test]
    fn budget_checks() {
        assert!(check_cut_budget(&[5, 5], &[false, false], &Q::zero()).is_ok());
        assert!(check_cut_budget(&[5, 5], &[true, false], &qi(4)).is_err());
    }

    #[test]
    fn triangle_tree_cost() {
        let g = Graph::new(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let (c, per) = check_tree_stretch(&g, &[0, 1], &[1, 1, 1]).unwrap();
        assert_eq!(c, 4);
        assert_eq!(per, vec![1, 1, 2]);
        assert_eq!(brute_force_min_tree_cost(&g, &[1, 1, 1]), Some(4));
        assert!(check_tree_stretch(&g, &[0], &[1, 1, 1]).is_err());
    }

    #[test]
    fn exponent_values() {
        assert_eq!(budget_exponent(&qi(1)), 1);
        assert_eq!(budget_exponent(&qi(4)), 3);
        assert_eq!(budget_exponent(&Q::new(1.into(), 4.into())), 0);
    }
}
