//! Weighted undirected graphs with integer lengths, the text format, subdivision
//! and exact multi-source shortest paths.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

pub const NONE: u32 = u32::MAX;

/// Default exponent C in the length bound n^C.
pub const DEFAULT_LEN_EXPONENT: u32 = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate identifier {0}")]
    DuplicateId(u64),
    #[error("identifier {id} does not fit in {b} bits")]
    IdTooWide { id: u64, b: u32 },
    #[error("edge length {len} exceeds bound {bound}")]
    LengthOverflow { len: u64, bound: u128 },
    #[error("node index {0} out of range")]
    BadIndex(usize),
    #[error("source set is empty")]
    EmptySources,
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: u64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    ids: Vec<u64>,
    b: u32,
    edges: Vec<Edge>,
    adj: Vec<Vec<(u32, u32)>>,
}

fn bits_needed(x: u64) -> u32 {
    64 - x.leading_zeros()
}

pub fn default_b(n: usize) -> u32 {
    crate::rational::ceil_log2_u(n as u64).max(1)
}

fn len_bound(n: usize, c: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..c {
        acc = acc.saturating_mul(n as u128);
    }
    acc
}

impl Graph {
    /// Build a graph with identifiers equal to node indices.
    pub fn new(n: usize, edges: &[(usize, usize, u64)]) -> Result<Graph, GraphError> {
        Graph::build(n, (0..n as u64).collect(), None, edges, DEFAULT_LEN_EXPONENT)
    }

    pub fn with_ids(
        n: usize,
        ids: Vec<u64>,
        b: Option<u32>,
        edges: &[(usize, usize, u64)],
    ) -> Result<Graph, GraphError> {
        Graph::build(n, ids, b, edges, DEFAULT_LEN_EXPONENT)
    }

    /// Full constructor: `c` is the exponent in the length bound n^c.
    pub fn build(
        n: usize,
        ids: Vec<u64>,
        b: Option<u32>,
        edges: &[(usize, usize, u64)],
        c: u32,
    ) -> Result<Graph, GraphError> {
        assert_eq!(ids.len(), n);
        let mut seen = HashSet::with_capacity(n);
        for &id in &ids {
            if !seen.insert(id) {
                return Err(GraphError::DuplicateId(id));
            }
        }
        let max_id = ids.iter().copied().max().unwrap_or(0);
        let b = match b {
            Some(b) => {
                if b == 0 || b > 63 || bits_needed(max_id) > b {
                    return Err(GraphError::IdTooWide { id: max_id, b });
                }
                b
            }
            None => default_b(n).max(bits_needed(max_id)),
        };
        let bound = len_bound(n, c);
        let mut best: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for &(u, v, len) in edges {
            if u >= n {
                return Err(GraphError::BadIndex(u));
            }
            if v >= n {
                return Err(GraphError::BadIndex(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if len as u128 > bound || len > (1u64 << 62) {
                return Err(GraphError::LengthOverflow { len, bound });
            }
            let key = (u.min(v), u.max(v));
            let e = best.entry(key).or_insert(len);
            *e = (*e).min(len);
        }
        let edges: Vec<Edge> = best.into_iter().map(|((u, v), len)| Edge { u, v, len }).collect();
        let mut adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v as u32, i as u32));
            adj[e.v].push((e.u as u32, i as u32));
        }
        Ok(Graph { n, ids, b, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.edges.len()
    }
    pub fn b(&self) -> u32 {
        self.b
    }
    pub fn id(&self, v: usize) -> u64 {
        self.ids[v]
    }
    pub fn ids(&self) -> &[u64] {
        &self.ids
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }
    /// Neighbors as (node, edge index).
    pub fn adj(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[v]
    }
    pub fn max_len(&self) -> u64 {
        self.edges.iter().map(|e| e.len).max().unwrap_or(0)
    }
    pub fn is_unit(&self) -> bool {
        self.edges.iter().all(|e| e.len == 1)
    }
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u].iter().find(|&&(w, _)| w as usize == v).map(|&(_, e)| e as usize)
    }

    /// Bit `k` of the identifier of `v`, counting from the most significant of b bits.
    pub fn id_bit_msb(&self, v: usize, k: u32) -> bool {
        (self.ids[v] >> (self.b - 1 - k)) & 1 == 1
    }

    /// Replace every edge {u,v} by u - v_e - w where u has the smaller identifier,
    /// with lengths 0 and len. Returns the new graph and the edge -> new node map.
    pub fn subdivide(&self) -> (Graph, Vec<usize>) {
        let n2 = self.n + self.edges.len();
        let mut ids = self.ids.clone();
        let base = self.ids.iter().copied().max().map(|x| x + 1).unwrap_or(0);
        let mut map = Vec::with_capacity(self.edges.len());
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let ve = self.n + i;
            ids.push(base + i as u64);
            map.push(ve);
            let (lo, hi) = if self.ids[e.u] < self.ids[e.v] { (e.u, e.v) } else { (e.v, e.u) };
            edges.push((lo, ve, 0));
            edges.push((ve, hi, e.len));
        }
        let g = Graph::build(n2, ids, None, &edges, 64).expect("subdivision preserves validity");
        (g, map)
    }

    /// Canonical text form: header, id lines where id differs from index, sorted edges.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p {} {}", self.n, self.edges.len());
        for (i, &id) in self.ids.iter().enumerate() {
            if id != i as u64 {
                let _ = writeln!(s, "v {} {}", i, id);
            }
        }
        for e in &self.edges {
            let _ = writeln!(s, "e {} {} {}", e.u, e.v, e.len);
        }
        s
    }
}

fn perr(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

/// Parse the text graph format. `c` is the length-bound exponent.
pub fn parse_graph_with(text: &str, c: u32) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize, Option<u32>)> = None;
    let mut ids: Vec<Option<(u64, usize)>> = Vec::new();
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(perr(ln, "second header line"));
                }
                if toks.len() != 3 && toks.len() != 4 {
                    return Err(perr(ln, "header must be `p <n> <m> [b]`"));
                }
                let n: usize = toks[1].parse().map_err(|_| perr(ln, "bad node count"))?;
                let m: usize = toks[2].parse().map_err(|_| perr(ln, "bad edge count"))?;
                let b = match toks.get(3) {
                    Some(t) => Some(t.parse::<u32>().map_err(|_| perr(ln, "bad bit width"))?),
                    None => None,
                };
                if n == 0 {
                    return Err(perr(ln, "graph must have at least one node"));
                }
                ids = vec![None; n];
                header = Some((n, m, b));
            }
            "v" => {
                let (n, _, _) = header.ok_or_else(|| perr(ln, "id line before header"))?;
                if toks.len() != 3 {
                    return Err(perr(ln, "id line must be `v <index> <id>`"));
                }
                let i: usize = toks[1].parse().map_err(|_| perr(ln, "bad index"))?;
                let id: u64 = toks[2].parse().map_err(|_| perr(ln, "bad identifier"))?;
                if i >= n {
                    return Err(perr(ln, "index out of range"));
                }
                if ids[i].is_some() {
                    return Err(perr(ln, "identifier assigned twice"));
                }
                ids[i] = Some((id, ln));
            }
            "e" => {
                let (n, _, _) = header.ok_or_else(|| perr(ln, "edge line before header"))?;
                if toks.len() != 4 {
                    return Err(perr(ln, "edge line must be `e <u> <v> <len>`"));
                }
                let u: usize = toks[1].parse().map_err(|_| perr(ln, "bad endpoint"))?;
                let v: usize = toks[2].parse().map_err(|_| perr(ln, "bad endpoint"))?;
                if toks[3].starts_with('-') {
                    return Err(perr(ln, "negative length"));
                }
                let len: u64 = toks[3].parse().map_err(|_| perr(ln, "length overflow or malformed length"))?;
                if u >= n || v >= n {
                    return Err(perr(ln, "endpoint out of range"));
                }
                if u == v {
                    return Err(perr(ln, "self-loop"));
                }
                if len as u128 > len_bound(n, c) {
                    return Err(perr(ln, format!("length overflow: {} > n^{}", len, c)));
                }
                edges.push((u, v, len));
                edge_lines.push(ln);
            }
            other => return Err(perr(ln, format!("unknown line type `{}`", other))),
        }
    }
    let (n, m, b) = header.ok_or_else(|| perr(0, "missing header"))?;
    if edges.len() != m {
        return Err(perr(0, format!("header declares {} edges, found {}", m, edges.len())));
    }
    let id_line: Vec<usize> = ids.iter().map(|x| x.map_or(0, |(_, l)| l)).collect();
    let ids: Vec<u64> = ids.iter().enumerate().map(|(i, x)| x.map_or(i as u64, |(id, _)| id)).collect();
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        if let Some(j) = seen.insert(id, i) {
            let line = id_line[i].max(id_line[j]);
            return Err(perr(line, format!("duplicate identifier {}", id)));
        }
    }
    Graph::build(n, ids, b, &edges, c).map_err(|e| perr(0, e.to_string()))
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    parse_graph_with(text, DEFAULT_LEN_EXPONENT)
}

pub fn load_graph(path: &Path) -> Result<Graph, GraphError> {
    let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(format!("{}: {}", path.display(), e)))?;
    parse_graph(&text)
}

/// A subgraph: alive nodes and alive edges. An edge counts only when it and
/// both endpoints are alive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub node: Vec<bool>,
    pub edge: Vec<bool>,
}

impl Subgraph {
    pub fn full(g: &Graph) -> Subgraph {
        Subgraph { node: vec![true; g.n()], edge: vec![true; g.m()] }
    }

    /// G[mask]
    pub fn induced(g: &Graph, mask: &[bool]) -> Subgraph {
        let edge = g.edges().iter().map(|e| mask[e.u] && mask[e.v]).collect();
        Subgraph { node: mask.to_vec(), edge }
    }

    /// self[mask]: keep alive nodes in `mask` and the alive edges between them.
    pub fn restrict(&self, g: &Graph, mask: &[bool]) -> Subgraph {
        let node: Vec<bool> = self.node.iter().zip(mask).map(|(&a, &b)| a && b).collect();
        let edge = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| self.edge[i] && node[e.u] && node[e.v])
            .collect();
        Subgraph { node, edge }
    }

    #[inline]
    pub fn edge_alive(&self, g: &Graph, e: usize) -> bool {
        let ed = g.edge(e);
        self.edge[e] && self.node[ed.u] && self.node[ed.v]
    }

    pub fn node_count(&self) -> usize {
        self.node.iter().filter(|&&x| x).count()
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.node.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }
}

/// Connected components of a subgraph; dead nodes get NONE.
pub fn components(g: &Graph, sub: &Subgraph) -> (Vec<u32>, usize) {
    let mut comp = vec![NONE; g.n()];
    let mut k = 0u32;
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if !sub.node[s] || comp[s] != NONE {
            continue;
        }
        comp[s] = k;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &(w, e) in g.adj(u) {
                let w = w as usize;
                if comp[w] == NONE && sub.edge_alive(g, e as usize) {
                    comp[w] = k;
                    stack.push(w);
                }
            }
        }
        k += 1;
    }
    (comp, k as usize)
}

/// Result of a multi-source shortest-path run.
#[derive(Debug, Clone)]
pub struct Sssp<T> {
    pub dist: Vec<Option<T>>,
    /// source node each reached node is attributed to
    pub src: Vec<u32>,
    pub pred: Vec<u32>,
    pub pred_edge: Vec<u32>,
    /// reached nodes in settle order (predecessors first)
    pub order: Vec<u32>,
}

/// Label-setting Dijkstra on any totally ordered distance type.
/// Labels are compared as (distance, source id, predecessor id); a node's
/// predecessor is the smallest-id neighbor, among nodes settled before it,
/// that attains its label.
pub fn sssp_core<T: Clone + Ord>(
    g: &Graph,
    sub: Option<&Subgraph>,
    init: impl IntoIterator<Item = (usize, T)>,
    cap: Option<&T>,
    step: impl Fn(&T, usize) -> T,
) -> Sssp<T> {
    let n = g.n();
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut src = vec![NONE; n];
    let mut pred = vec![NONE; n];
    let mut pred_edge = vec![NONE; n];
    let mut done = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    let node_ok = |v: usize| sub.map_or(true, |s| s.node[v]);
    for (s, d) in init {
        assert!(node_ok(s), "source {} is not in the subgraph", s);
        if let Some(c) = cap {
            if &d > c {
                continue;
            }
        }
        let better = match &dist[s] {
            None => true,
            Some(cur) => (&d, g.id(s)) < (cur, g.id(src[s] as usize)),
        };
        if better {
            dist[s] = Some(d.clone());
            src[s] = s as u32;
            heap.push(Reverse((d, g.id(s), s as u32)));
        }
    }
    while let Some(Reverse((d, sid, u))) = heap.pop() {
        let u = u as usize;
        if done[u] {
            continue;
        }
        match &dist[u] {
            Some(cur) if *cur == d && g.id(src[u] as usize) == sid => {}
            _ => continue,
        }
        done[u] = true;
        order.push(u as u32);
        let uid = g.id(u);
        for &(w, e) in g.adj(u) {
            let w = w as usize;
            let e = e as usize;
            if done[w] {
                continue;
            }
            if let Some(s) = sub {
                if !s.edge_alive(g, e) {
                    continue;
                }
            }
            let nd = step(&d, e);
            if let Some(c) = cap {
                if &nd > c {
                    continue;
                }
            }
            let better = match &dist[w] {
                None => true,
                Some(cur) => {
                    let cur_sid = g.id(src[w] as usize);
                    let cur_pid = if pred[w] == NONE { None } else { Some(g.id(pred[w] as usize)) };
                    (&nd, sid, Some(uid)) < (cur, cur_sid, cur_pid)
                }
            };
            if better {
                dist[w] = Some(nd.clone());
                src[w] = src[u];
                pred[w] = u as u32;
                pred_edge[w] = e as u32;
                heap.push(Reverse((nd, sid, w as u32)));
            }
        }
    }
    // drop labels that were never settled (cannot happen without a cap, kept for clarity)
    for v in 0..n {
        if !done[v] {
            dist[v] = None;
            src[v] = NONE;
            pred[v] = NONE;
            pred_edge[v] = NONE;
        }
    }
    Sssp { dist, src, pred, pred_edge, order }
}

fn add_len(d: &i128, len: u64) -> i128 {
    d.checked_add(len as i128).expect("distance overflow")
}

/// Exact delayed multi-source distances d_del(S, v), truncated at `cap`.
/// `sources` are (node, delay) pairs.
pub fn dijkstra_multi(
    g: &Graph,
    sub: Option<&Subgraph>,
    sources: &[(usize, i128)],
    cap: Option<i128>,
) -> Result<Sssp<i128>, GraphError> {
    if sources.is_empty() {
        return Err(GraphError::EmptySources);
    }
    for &(s, _) in sources {
        if s >= g.n() {
            return Err(GraphError::BadIndex(s));
        }
    }
    Ok(sssp_core(g, sub, sources.iter().copied(), cap.as_ref(), |d, e| add_len(d, g.edge(e).len)))
}

/// Plain distances from a node set with zero delays.
pub fn dist_from_set(g: &Graph, sub: Option<&Subgraph>, set: &[bool], cap: Option<i128>) -> Vec<Option<i128>> {
    let init = (0..g.n()).filter(|&v| set[v] && sub.map_or(true, |s| s.node[v])).map(|v| (v, 0i128));
    sssp_core(g, sub, init, cap.as_ref(), |d, e| add_len(d, g.edge(e).len)).dist
}

/// Distances from a single node.
pub fn dist_from(g: &Graph, sub: Option<&Subgraph>, s: usize, cap: Option<i128>) -> Vec<Option<i128>> {
    sssp_core(g, sub, std::iter::once((s, 0i128)), cap.as_ref(), |d, e| add_len(d, g.edge(e).len)).dist
}
