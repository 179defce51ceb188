//! Strong-diameter clustering of unweighted graphs by identifier bit phases.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{components, Graph, Subgraph, NONE};
use crate::oracles::Oracles;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrongError {
    #[error("edge {0} has length {1}; strong clustering needs unit lengths")]
    Weighted(usize, u64),
    #[error("phase {phase}: {msg}")]
    Invariant { phase: u32, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongCluster {
    pub center: usize,
    pub nodes: Vec<usize>,
    /// (child, parent) pairs of a BFS tree rooted at the center
    pub tree_edges: Vec<(usize, usize)>,
}

/// State after phase i: surviving nodes V_i and centers Q_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseState {
    pub i: u32,
    pub alive: Vec<bool>,
    pub centers: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRecord {
    pub i: u32,
    /// capped d(Q^R,.) - d(Q^B,.) on V_i, None outside V_i
    pub diff: Vec<Option<i64>>,
    pub bucket_sizes: Vec<u64>,
    pub j_star: u32,
    pub deleted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongClustering {
    pub b: u32,
    pub clusters: Vec<StrongCluster>,
    pub unclustered: Vec<usize>,
    /// states 0..=b
    pub states: Vec<PhaseState>,
    pub phases: Vec<PhaseRecord>,
}

impl StrongClustering {
    pub fn clustered_count(&self) -> usize {
        self.clusters.iter().map(|c| c.nodes.len()).sum()
    }
}

/// BFS distances from `src` inside `alive`, truncated at `cap`.
pub fn bfs_capped(g: &Graph, alive: &[bool], src: &[bool], cap: Option<u64>) -> Vec<Option<u64>> {
    let mut d = vec![None; g.n()];
    let mut q = VecDeque::new();
    for v in 0..g.n() {
        if alive[v] && src[v] {
            d[v] = Some(0);
            q.push_back(v);
        }
    }
    while let Some(u) = q.pop_front() {
        let du = d[u].unwrap();
        if cap.is_some_and(|c| du >= c) {
            continue;
        }
        for &(w, _) in g.adj(u) {
            let w = w as usize;
            if alive[w] && d[w].is_none() {
                d[w] = Some(du + 1);
                q.push_back(w);
            }
        }
    }
    d
}

/// Check the three phase invariants for state i.
pub fn check_phase_invariants(g: &Graph, st: &PhaseState) -> Result<(), String> {
    let n = g.n() as u64;
    let b = g.b() as u64;
    let i = st.i as u64;
    for v in 0..g.n() {
        if st.centers[v] && !st.alive[v] {
            return Err(format!("center {} is not alive", v));
        }
    }
    let sub = Subgraph::induced(g, &st.alive);
    let (comp, k) = components(g, &sub);
    let mut prefix: Vec<Option<u64>> = vec![None; k];
    for v in 0..g.n() {
        if st.centers[v] {
            let p = if i == 0 { 0 } else { g.id(v) >> (b - i) };
            let c = comp[v] as usize;
            match prefix[c] {
                None => prefix[c] = Some(p),
                Some(q) if q != p => {
                    return Err(format!("separation: centers in one component disagree on the first {} bits at node {}", i, v))
                }
                _ => {}
            }
        }
    }
    let d = bfs_capped(g, &st.alive, &st.centers, None);
    for v in 0..g.n() {
        if st.alive[v] {
            match d[v] {
                Some(x) if x <= 6 * i * b => {}
                other => return Err(format!("ruling: d_{}(Q,{}) = {:?} > {}", i, v, other, 6 * i * b)),
            }
        }
    }
    let alive = st.alive.iter().filter(|&&a| a).count() as u64;
    if 3 * b * alive < 3 * b * n - i * n {
        return Err(format!("deletion: |V_{}| = {} < n - {}n/(3b)", i, alive, i));
    }
    Ok(())
}

/// Run the b phases. Invariants are checked after every phase.
pub fn strong_cluster(g: &Graph, oracles: &Oracles) -> Result<StrongClustering, StrongError> {
    for (k, e) in g.edges().iter().enumerate() {
        if e.len != 1 {
            return Err(StrongError::Weighted(k, e.len));
        }
    }
    let n = g.n();
    let b = g.b();
    let mut alive = vec![true; n];
    let mut centers = vec![true; n];
    let mut states = vec![PhaseState { i: 0, alive: alive.clone(), centers: centers.clone() }];
    let mut phases = Vec::new();
    for i in 0..b {
        let cap = 6 * (i as u64 + 1) * b as u64;
        let red: Vec<bool> = (0..n).map(|v| centers[v] && g.id_bit_msb(v, i)).collect();
        let blue: Vec<bool> = (0..n).map(|v| centers[v] && !g.id_bit_msb(v, i)).collect();
        let dr = bfs_capped(g, &alive, &red, Some(cap));
        let db = bfs_capped(g, &alive, &blue, Some(cap));
        let diff: Vec<Option<i64>> = (0..n)
            .map(|v| {
                if alive[v] {
                    Some(dr[v].unwrap_or(cap) as i64 - db[v].unwrap_or(cap) as i64)
                } else {
                    None
                }
            })
            .collect();
        let slots = 3 * b as usize;
        let x: Vec<Vec<bool>> = diff
            .iter()
            .map(|d| {
                let mut row = vec![false; slots];
                if let Some(d) = *d {
                    if (0..6 * b as i64).contains(&d) {
                        row[d as usize / 2] = true;
                    }
                }
                row
            })
            .collect();
        let sub = Subgraph::induced(g, &alive);
        let sizes = oracles.count(&sub, b, &x).expect("index set has length 3b");
        let k_star = (0..slots).min_by_key(|&k| (sizes[k], k)).unwrap();
        let j_star = 2 * k_star as i64;
        let mut deleted = Vec::new();
        for v in 0..n {
            if let Some(d) = diff[v] {
                if d == j_star || d == j_star + 1 {
                    alive[v] = false;
                    deleted.push(v);
                }
                if (0..=j_star + 1).contains(&d) {
                    centers[v] = false;
                }
            }
        }
        if 3 * b as usize * deleted.len() > n {
            return Err(StrongError::Invariant { phase: i, msg: format!("pigeonhole: {} deleted > n/(3b)", deleted.len()) });
        }
        let st = PhaseState { i: i + 1, alive: alive.clone(), centers: centers.clone() };
        check_phase_invariants(g, &st).map_err(|msg| StrongError::Invariant { phase: i + 1, msg })?;
        states.push(st);
        phases.push(PhaseRecord { i, diff, bucket_sizes: sizes, j_star: j_star as u32, deleted });
    }

    let sub = Subgraph::induced(g, &alive);
    let (comp, k) = components(g, &sub);
    let mut center_of = vec![NONE; k];
    for v in 0..n {
        if centers[v] {
            let c = comp[v] as usize;
            if center_of[c] != NONE {
                return Err(StrongError::Invariant { phase: b, msg: format!("component with two centers {} and {}", center_of[c], v) });
            }
            center_of[c] = v as u32;
        }
    }
    let mut clusters = Vec::with_capacity(k);
    for c in 0..k {
        let center = center_of[c];
        if center == NONE {
            return Err(StrongError::Invariant { phase: b, msg: "component without a center".into() });
        }
        let center = center as usize;
        let mut nodes = Vec::new();
        let mut tree_edges = Vec::new();
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([center]);
        seen[center] = true;
        while let Some(u) = q.pop_front() {
            nodes.push(u);
            for &(w, _) in g.adj(u) {
                let w = w as usize;
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    tree_edges.push((w, u));
                    q.push_back(w);
                }
            }
        }
        nodes.sort_unstable();
        clusters.push(StrongCluster { center, nodes, tree_edges });
    }
    clusters.sort_by_key(|c| c.nodes[0]);
    let unclustered = (0..n).filter(|&v| !alive[v]).collect();
    Ok(StrongClustering { b, clusters, unclustered, states, phases })
}

/// The composed variant: a single whole-graph pre-cluster followed by the phase algorithm.
pub fn strong_cluster_composed(g: &Graph, oracles: &Oracles) -> Result<StrongClustering, StrongError> {
    strong_cluster(g, oracles)
}
