//! Star decompositions and the low-stretch spanning tree recursion built on them.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::blurry::blurry_edge;
use crate::clustering::edgecut::{edge_cutting, EdgeCutInput};
use crate::clustering::ClusterError;
use crate::graph::{dijkstra_multi, dist_from, Graph, Subgraph, NONE};
use crate::oracles::{Delays, Oracles};
use crate::params::{eps_blur, Choice, SelfCheck};
use crate::rational::{ceil_log2_u, min_q, pow, q, qi, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LsstError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("part rooted at {root}: node {node} is farther than the allowed radius {radius}")]
    Radius { root: usize, node: usize, radius: String },
    #[error("precision must be at most 1/10")]
    Precision,
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("{0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub root: usize,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Satellite {
    pub root: usize,
    pub nodes: Vec<usize>,
    /// y_j in the center piece
    pub anchor: usize,
    /// edge {anchor, root}
    pub bridge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub root: usize,
    pub center: Vec<usize>,
    pub satellites: Vec<Satellite>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarDecomposition {
    pub stars: Vec<Star>,
    pub radius: Q,
    pub eps: Q,
    /// mu weight of part edges that end up between pieces
    pub cut_weight: u128,
}

impl StarDecomposition {
    /// All pieces as parts, centers first in input order, then satellites.
    pub fn pieces(&self) -> Vec<Part> {
        let mut out: Vec<Part> = self.stars.iter().map(|s| Part { root: s.root, nodes: s.center.clone() }).collect();
        for s in &self.stars {
            for sat in &s.satellites {
                out.push(Part { root: sat.root, nodes: sat.nodes.clone() });
            }
        }
        out
    }
}

/// Membership vector and the subgraph of edges inside parts.
pub fn part_subgraph(g: &Graph, parts: &[Part]) -> (Vec<u32>, Subgraph) {
    let mut part_of = vec![NONE; g.n()];
    for (i, p) in parts.iter().enumerate() {
        for &v in &p.nodes {
            part_of[v] = i as u32;
        }
    }
    let node = part_of.iter().map(|&p| p != NONE).collect();
    let edge = g.edges().iter().map(|e| part_of[e.u] != NONE && part_of[e.u] == part_of[e.v]).collect();
    (part_of, Subgraph { node, edge })
}

fn check_radius(g: &Graph, h: &Subgraph, parts: &[Part], radius: &Q) -> Result<(), LsstError> {
    for p in parts {
        let d = dist_from(g, Some(h), p.root, None);
        for &v in &p.nodes {
            if !d[v].is_some_and(|x| qi(x) <= *radius) {
                return Err(LsstError::Radius { root: p.root, node: v, radius: radius.to_string() });
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn star_decompose(
    o: &Oracles,
    g: &Graph,
    parts: &[Part],
    radius: &Q,
    mu_e: &[u64],
    eps: &Q,
    mut choice: Choice,
    check: SelfCheck,
) -> Result<StarDecomposition, LsstError> {
    if *eps > q(1, 10) {
        return Err(LsstError::Precision);
    }
    let n = g.n();
    let (part_of, h) = part_subgraph(g, parts);
    if check == SelfCheck::Full {
        check_radius(g, &h, parts, radius)?;
    }
    let roots: Vec<usize> = parts.iter().map(|p| p.root).collect();
    let mut stars: Vec<Star> = parts.iter().map(|p| Star { root: p.root, center: Vec::new(), satellites: Vec::new() }).collect();
    if roots.is_empty() {
        return Ok(StarDecomposition { stars, radius: radius.clone(), eps: eps.clone(), cut_weight: 0 });
    }
    let f = o.dist(g, &h, &roots, Delays::Zero, radius, &(eps / qi(100))).map_err(|e| LsstError::Invariant(e.to_string()))?;
    if let Some(v) = h.nodes().find(|&v| !f.member[v]) {
        let p = &parts[part_of[v] as usize];
        return Err(LsstError::Radius { root: p.root, node: v, radius: radius.to_string() });
    }
    let two_thirds = qi(2) * radius / qi(3);
    let s: Vec<bool> = (0..n).map(|v| h.node[v] && qi(f.df[v]) <= two_thirds).collect();
    let d_blur = eps * radius / qi(100);
    let eb = blurry_edge(o, g, &h, &s, mu_e, &d_blur, &eps_blur(n + g.m()), choice.reborrow(), check);
    let sup = eb.s_sup;

    let outside: Vec<bool> = (0..n).map(|v| h.node[v] && !sup[v]).collect();
    let h_out = h.restrict(g, &outside);
    let mut term = vec![false; n];
    let mut del = vec![Q::zero(); n];
    for v in h_out.nodes() {
        if let Some(p) = f.parent_of(v) {
            if sup[p] {
                term[v] = true;
                del[v] = qi(f.df[v]) - &two_thirds;
            }
        }
    }
    for v in h.nodes() {
        if sup[v] {
            stars[part_of[v] as usize].center.push(v);
        }
    }
    if h_out.node_count() > 0 {
        let inp = EdgeCutInput { h: &h_out, mu: mu_e, q: &term, del: &del, ruling: radius / qi(2), eps: eps / qi(10) };
        let ec = edge_cutting(o, g, &inp, choice.reborrow(), check)?;
        for c in &ec.clusters {
            let r = c.terminal;
            let anchor = f.parent_of(r).expect("terminal has a parent in the center");
            let sat = Satellite { root: r, nodes: c.nodes.clone(), anchor, bridge: f.parent_edge[r] as usize };
            stars[part_of[r] as usize].satellites.push(sat);
        }
    }
    let mut piece = vec![NONE; n];
    let mut k = 0u32;
    for st in &stars {
        for &v in &st.center {
            piece[v] = k;
        }
        k += 1;
        for sat in &st.satellites {
            for &v in &sat.nodes {
                piece[v] = k;
            }
            k += 1;
        }
    }
    let cut_weight = (0..g.m())
        .filter(|&e| h.edge[e] && h.edge_alive(g, e) && piece[g.edge(e).u] != piece[g.edge(e).v])
        .map(|e| mu_e[e] as u128)
        .sum();
    let sd = StarDecomposition { stars, radius: radius.clone(), eps: eps.clone(), cut_weight };
    if check >= SelfCheck::Fast {
        check_star_conditions(g, parts, &sd).map_err(LsstError::Invariant)?;
    }
    Ok(sd)
}

/// Distances from `src` inside the node set `nodes`.
fn dist_within(g: &Graph, nodes: &[usize], src: usize) -> Vec<Option<i128>> {
    let mut mask = vec![false; g.n()];
    for &v in nodes {
        mask[v] = true;
    }
    dist_from(g, Some(&Subgraph::induced(g, &mask)), src, None)
}

/// The three star conditions for every part, on exact distances.
pub fn check_star_conditions(g: &Graph, parts: &[Part], sd: &StarDecomposition) -> Result<(), String> {
    let one_eps = Q::one() + &sd.eps;
    let three_quarters = qi(3) * &sd.radius / qi(4);
    for (p, st) in parts.iter().zip(&sd.stars) {
        let dg = dist_within(g, &p.nodes, p.root);
        let d0 = dist_within(g, &st.center, st.root);
        for &v in &st.center {
            let lhs = d0[v].ok_or(format!("center node {} unreachable from {}", v, st.root))?;
            if qi(lhs) > &one_eps * qi(dg[v].unwrap()) {
                return Err(format!("condition 2 fails at {}: {} > (1+eps) {}", v, lhs, dg[v].unwrap()));
            }
        }
        for sat in &st.satellites {
            let dj = dist_within(g, &sat.nodes, sat.root);
            let e = g.edge(sat.bridge);
            if !((e.u == sat.anchor && e.v == sat.root) || (e.v == sat.anchor && e.u == sat.root)) {
                return Err(format!("bridge {} does not join {} and {}", sat.bridge, sat.anchor, sat.root));
            }
            let base = d0[sat.anchor].ok_or(format!("anchor {} not in the center", sat.anchor))? + e.len as i128;
            for &v in &sat.nodes {
                let x = dj[v].ok_or(format!("satellite node {} unreachable from {}", v, sat.root))?;
                if qi(x) > three_quarters {
                    return Err(format!("condition 1 fails at {}: {} > 3R/4", v, x));
                }
                if qi(base + x) > &one_eps * qi(dg[v].unwrap()) {
                    return Err(format!("condition 3 fails at {}: {} > (1+eps) {}", v, base + x, dg[v].unwrap()));
                }
            }
        }
    }
    Ok(())
}

/// Per-level record of the recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelReport {
    pub j: u32,
    pub parts: Vec<Part>,
    /// forest returned at this level, one tree per part
    pub forest: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsstForest {
    pub edges: Vec<usize>,
    pub roots: Vec<usize>,
}

/// (4/3)^(j-2) for j >= 2, 3/4 for j = 1.
pub fn level_radius(j: u32) -> Q {
    if j >= 2 {
        pow(&q(4, 3), j - 2)
    } else {
        q(3, 4)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn lsst_recurse(
    o: &Oracles,
    g: &Graph,
    parts: &[Part],
    j: u32,
    mu_e: &[u64],
    eps: &Q,
    mut choice: Choice,
    check: SelfCheck,
    report: &mut Vec<LevelReport>,
) -> Result<LsstForest, LsstError> {
    let (_, h) = part_subgraph(g, parts);
    let mut in_f = vec![false; g.m()];
    if j <= 1 {
        if check == SelfCheck::Full {
            check_radius(g, &h, parts, &Q::zero())?;
        }
        let roots: Vec<(usize, i128)> = parts.iter().map(|p| (p.root, 0)).collect();
        if !roots.is_empty() {
            let sp = dijkstra_multi(g, Some(&h), &roots, None).map_err(|e| LsstError::Invariant(e.to_string()))?;
            for p in parts {
                for &v in &p.nodes {
                    if v != p.root {
                        let e = sp.pred_edge[v];
                        if e == NONE {
                            return Err(LsstError::Radius { root: p.root, node: v, radius: "0".into() });
                        }
                        in_f[e as usize] = true;
                    }
                }
            }
        }
    } else {
        let sd = star_decompose(o, g, parts, &level_radius(j), mu_e, eps, choice.reborrow(), check)?;
        let pieces = sd.pieces();
        let sub = lsst_recurse(o, g, &pieces, j - 1, mu_e, eps, choice.reborrow(), check, report)?;
        for e in sub.edges {
            in_f[e] = true;
        }
        for st in &sd.stars {
            for sat in &st.satellites {
                in_f[sat.bridge] = true;
            }
        }
    }
    let edges: Vec<usize> = (0..g.m()).filter(|&e| in_f[e]).collect();
    let total: usize = parts.iter().map(|p| p.nodes.len()).sum();
    if edges.len() != total - parts.len() {
        return Err(LsstError::Invariant(format!("level {}: forest has {} edges, expected {}", j, edges.len(), total - parts.len())));
    }
    if check >= SelfCheck::Fast {
        check_level_stretch(g, parts, &edges, j, eps).map_err(LsstError::Invariant)?;
    }
    report.push(LevelReport { j, parts: parts.to_vec(), forest: edges.clone() });
    Ok(LsstForest { edges, roots: parts.iter().map(|p| p.root).collect() })
}

/// d_F(r, v) <= (1+eps)^j d_{G[V_i]}(r, v) for every part.
pub fn check_level_stretch(g: &Graph, parts: &[Part], forest: &[usize], j: u32, eps: &Q) -> Result<(), String> {
    let factor = pow(&(Q::one() + eps), j);
    let fsub = Subgraph { node: vec![true; g.n()], edge: { let mut m = vec![false; g.m()]; for &e in forest { m[e] = true; } m } };
    for p in parts {
        let dg = dist_within(g, &p.nodes, p.root);
        let df = dist_from(g, Some(&fsub), p.root, None);
        for &v in &p.nodes {
            let x = df[v].ok_or(format!("level {}: {} not connected to root {} in F", j, v, p.root))?;
            if qi(x) > &factor * qi(dg[v].unwrap()) {
                return Err(format!("level {}: d_F({},{}) = {} > (1+eps)^{} * {}", j, p.root, v, x, j, dg[v].unwrap()));
            }
        }
    }
    Ok(())
}

/// Exact diameter by Dijkstra from every node; None when disconnected.
pub fn diameter(g: &Graph) -> Option<i128> {
    let mut best = 0;
    for v in 0..g.n() {
        let d = dist_from(g, None, v, None);
        for x in d {
            best = best.max(x?);
        }
    }
    Some(best)
}

/// Smallest j >= 2 with (4/3)^(j-2) >= diam, or 1 for diameter 0.
pub fn top_level(diam: i128) -> u32 {
    if diam == 0 {
        return 1;
    }
    let mut j = 2;
    while level_radius(j) < qi(diam) {
        j += 1;
    }
    j
}

pub fn default_eps(n: usize) -> Q {
    min_q(&q(1, 10), &q(1, ceil_log2_u(n.max(2) as u64) as i64))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lsst {
    pub edges: Vec<usize>,
    pub root: usize,
    pub j: u32,
    pub eps: Q,
    pub diameter: i128,
    /// sum mu(e) d_T(u, v)
    pub tree_cost: u128,
    /// sum mu(e) l(e)
    pub graph_cost: u128,
    pub levels: Vec<LevelReport>,
}

impl Lsst {
    /// Average stretch tree_cost / graph_cost, None when the graph cost is 0.
    pub fn ratio(&self) -> Option<Q> {
        if self.graph_cost == 0 {
            None
        } else {
            Some(Q::new((self.tree_cost as i128).into(), (self.graph_cost as i128).into()))
        }
    }
}

/// Tree distance for every edge of G, by walking the rooted tree.
pub fn tree_edge_distances(g: &Graph, tree: &[usize], root: usize) -> Option<Vec<i128>> {
    let n = g.n();
    let mask = {
        let mut m = vec![false; g.m()];
        for &e in tree {
            m[e] = true;
        }
        m
    };
    let mut parent = vec![NONE; n];
    let mut plen = vec![0i128; n];
    let mut depth = vec![0usize; n];
    let mut dist = vec![0i128; n];
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        for &(w, e) in g.adj(u) {
            let (w, e) = (w as usize, e as usize);
            if mask[e] && !seen[w] {
                seen[w] = true;
                parent[w] = u as u32;
                plen[w] = g.edge(e).len as i128;
                depth[w] = depth[u] + 1;
                dist[w] = dist[u] + plen[w];
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return None;
    }
    Some(
        g.edges()
            .iter()
            .map(|e| {
                let (mut a, mut b) = (e.u, e.v);
                while depth[a] > depth[b] {
                    a = parent[a] as usize;
                }
                while depth[b] > depth[a] {
                    b = parent[b] as usize;
                }
                while a != b {
                    a = parent[a] as usize;
                    b = parent[b] as usize;
                }
                dist[e.u] + dist[e.v] - 2 * dist[a]
            })
            .collect(),
    )
}

pub fn lsst(o: &Oracles, g: &Graph, mu_e: &[u64], mut choice: Choice, check: SelfCheck) -> Result<Lsst, LsstError> {
    let n = g.n();
    let diam = diameter(g).ok_or(LsstError::Disconnected)?;
    let j = top_level(diam);
    let eps = default_eps(n);
    let parts = [Part { root: 0, nodes: (0..n).collect() }];
    let mut levels = Vec::new();
    let f = lsst_recurse(o, g, &parts, j, mu_e, &eps, choice.reborrow(), check, &mut levels)?;
    levels.reverse();
    let dt = tree_edge_distances(g, &f.edges, 0).ok_or_else(|| LsstError::Invariant("output does not span".into()))?;
    let tree_cost = g.edges().iter().enumerate().map(|(k, _)| mu_e[k] as u128 * dt[k] as u128).sum();
    let graph_cost = g.edges().iter().enumerate().map(|(k, e)| mu_e[k] as u128 * e.len as u128).sum();
    Ok(Lsst { edges: f.edges, root: 0, j, eps, diameter: diam, tree_cost, graph_cost, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_levels() {
        assert_eq!(top_level(0), 1);
        assert_eq!(top_level(1), 2);
        assert_eq!(top_level(2), 5);
        assert_eq!(level_radius(5), q(64, 27));
    }

    #[test]
    fn single_node_star() {
        let g = Graph::new(1, &[]).unwrap();
        let sd = star_decompose(&Oracles::default(), &g, &[Part { root: 0, nodes: vec![0] }], &qi(1), &[], &q(1, 10), Choice::Det, SelfCheck::Full).unwrap();
        assert_eq!(sd.stars[0].center, vec![0]);
        assert!(sd.stars[0].satellites.is_empty());
    }

    #[test]
    fn tree_is_returned() {
        let g = Graph::new(5, &[(0, 1, 2), (1, 2, 1), (1, 3, 3), (3, 4, 1)]).unwrap();
        let t = lsst(&Oracles::default(), &g, &[1; 4], Choice::Det, SelfCheck::Full).unwrap();
        assert_eq!(t.edges, vec![0, 1, 2, 3]);
        assert_eq!(t.ratio(), Some(Q::one()));
    }

    #[test]
    fn unit_triangle_cost_four() {
        let g = Graph::new(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let t = lsst(&Oracles::default(), &g, &[1; 3], Choice::Det, SelfCheck::Full).unwrap();
        assert_eq!(t.edges.len(), 2);
        assert_eq!(t.tree_cost, 4);
        assert_eq!(t.graph_cost, 3);
    }

    #[test]
    fn star_graph_conditions() {
        let g = Graph::new(6, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1), (4, 5, 3)]).unwrap();
        let parts = [Part { root: 0, nodes: (0..6).collect() }];
        let sd = star_decompose(&Oracles::default(), &g, &parts, &qi(4), &[1; 5], &q(1, 10), Choice::Det, SelfCheck::Full).unwrap();
        check_star_conditions(&g, &parts, &sd).unwrap();
        for v in 0..4 {
            assert!(sd.stars[0].center.contains(&v));
        }
    }
}
