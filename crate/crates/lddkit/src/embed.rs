//! l1 embedding from sparse covers at geometric scales: every cluster gets a
//! binary label, and each label bit contributes the distance to the nodes
//! whose cluster has that bit cleared.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::clustering::{sparse_cover, ClusterError};
use crate::graph::{dist_from, Graph, NONE};
use crate::oracles::Oracles;
use crate::params::{Choice, SelfCheck};
use crate::rational::{ceil_log2_u, pow, q, qi, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge {0} has length 0")]
    ZeroLength(usize),
    #[error("code verification failed: {0}")]
    Code(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// Binary labels for b-bit identifiers with a guaranteed pairwise Hamming distance.
pub trait ClusterCode {
    fn name(&self) -> &'static str;
    fn len(&self) -> usize;
    fn encode(&self, id: u64) -> Vec<bool>;
    /// distinct inputs differ in at least this many positions
    fn distance(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The identifier bits themselves, MSB first.
#[derive(Debug, Clone)]
pub struct RawIds {
    pub b: u32,
}

impl ClusterCode for RawIds {
    fn name(&self) -> &'static str {
        "raw"
    }
    fn len(&self) -> usize {
        self.b as usize
    }
    fn encode(&self, id: u64) -> Vec<bool> {
        (0..self.b).map(|k| (id >> (self.b - 1 - k)) & 1 == 1).collect()
    }
    fn distance(&self) -> usize {
        1
    }
}

pub const MASKS: [u64; 10] = [
    0x9e37_79b9_7f4a_7c15,
    0xbf58_476d_1ce4_e5b9,
    0x94d0_49bb_1331_11eb,
    0x2545_f491_4f6c_dd1d,
    0xd6e8_feb8_6659_fd93,
    0xa076_1d64_78bd_642f,
    0xe703_7ed1_a0b4_28db,
    0x8ebc_6af0_9c88_c6e3,
    0x5899_65cc_7537_4cc3,
    0x1d8e_4e27_c47d_124f,
];

/// Ten copies of the identifier, each XOR-ed with a fixed mask.
#[derive(Debug, Clone)]
pub struct RepetitionCode {
    pub b: u32,
    distance: usize,
}

impl RepetitionCode {
    /// Builds the code and certifies its distance: exhaustively for b <= 14,
    /// on sampled pairs above.
    pub fn new(b: u32) -> Result<RepetitionCode, EmbedError> {
        let code = RepetitionCode { b, distance: MASKS.len() };
        code.certify()?;
        Ok(code)
    }

    /// Block k of the label of `id`, as the low b bits of a word.
    fn block(&self, id: u64, k: usize) -> u64 {
        let mask = if self.b >= 64 { u64::MAX } else { (1u64 << self.b) - 1 };
        (id ^ MASKS[k]) & mask
    }

    fn packed_distance(&self, x: u64, y: u64) -> usize {
        (0..MASKS.len()).map(|k| (self.block(x, k) ^ self.block(y, k)).count_ones() as usize).sum()
    }

    fn certify(&self) -> Result<(), EmbedError> {
        let fail = |x: u64, y: u64, d: usize| EmbedError::Code(format!("ids {} and {} differ in {} positions", x, y, d));
        if self.b <= 14 {
            let all = 1u64 << self.b;
            for x in 0..all {
                for y in x + 1..all {
                    let d = self.packed_distance(x, y);
                    if d < self.distance {
                        return Err(fail(x, y, d));
                    }
                }
            }
        } else {
            let mask = if self.b >= 64 { u64::MAX } else { (1u64 << self.b) - 1 };
            let mut s = 0x1234_5678_9abc_def0u64;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                s & mask
            };
            for _ in 0..4096 {
                let (x, y) = (next(), next());
                let d = self.packed_distance(x, y);
                if x != y && d < self.distance {
                    return Err(fail(x, y, d));
                }
            }
        }
        Ok(())
    }
}

impl ClusterCode for RepetitionCode {
    fn name(&self) -> &'static str {
        "repetition"
    }
    fn len(&self) -> usize {
        self.b as usize * MASKS.len()
    }
    fn encode(&self, id: u64) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.len());
        for m in MASKS {
            let w = id ^ m;
            out.extend((0..self.b).map(|k| (w >> (self.b - 1 - k)) & 1 == 1));
        }
        out
    }
    fn distance(&self) -> usize {
        self.distance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labeling {
    Raw,
    Repetition,
}

pub fn make_code(labeling: Labeling, b: u32) -> Result<Box<dyn ClusterCode>, EmbedError> {
    Ok(match labeling {
        Labeling::Raw => Box::new(RawIds { b }),
        Labeling::Repetition => Box::new(RepetitionCode::new(b)?),
    })
}

/// One partition of a scale: cluster index per node and padding flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalePartition {
    pub cluster_of: Vec<u32>,
    pub padded: Vec<bool>,
    /// label per cluster index: encoding of the smallest member id
    pub labels: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scale {
    /// D = 2^i
    pub i: i32,
    pub d: Q,
    /// strong diameter bound of every cluster at this scale
    pub diameter_bound: Q,
    pub partitions: Vec<ScalePartition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coord {
    pub scale: usize,
    pub partition: u32,
    pub bit: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub dims: usize,
    /// x[v][c]
    pub x: Vec<Vec<u64>>,
    pub provenance: Vec<Coord>,
    pub scales: Vec<Scale>,
    pub t: u32,
    pub code_name: String,
    pub code_len: usize,
    pub code_distance: usize,
}

impl Embedding {
    pub fn l1(&self, u: usize, v: usize) -> u128 {
        self.x[u].iter().zip(&self.x[v]).map(|(a, b)| a.abs_diff(*b) as u128).sum()
    }
}

fn label_partition(g: &Graph, cluster_of: &[u32], padded: Vec<bool>, code: &dyn ClusterCode) -> ScalePartition {
    let k = cluster_of.iter().filter(|&&c| c != NONE).map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut min_id = vec![u64::MAX; k];
    for v in 0..g.n() {
        let c = cluster_of[v] as usize;
        min_id[c] = min_id[c].min(g.id(v));
    }
    let labels = min_id.iter().map(|&id| code.encode(id)).collect();
    ScalePartition { cluster_of: cluster_of.to_vec(), padded, labels }
}

/// Largest scale exponent: ceil(log2(n * lmax)).
pub fn top_scale(g: &Graph) -> i32 {
    ceil_log2_u((g.n() as u64).max(1).saturating_mul(g.max_len().max(1))) as i32
}

pub fn l1_embed(o: &Oracles, g: &Graph, labeling: Labeling, mut choice: Choice, check: SelfCheck) -> Result<Embedding, EmbedError> {
    let n = g.n();
    if let Some(k) = g.edges().iter().position(|e| e.len == 0) {
        return Err(EmbedError::ZeroLength(k));
    }
    if n > 0 && dist_from(g, None, 0, None).iter().any(|d| d.is_none()) {
        return Err(EmbedError::Disconnected);
    }
    let code = make_code(labeling, g.b())?;
    let t = crate::clustering::padded::cover_rounds(n);
    let mut scales = Vec::new();
    // one sub-unit scale: with lengths >= 1 every ball of radius 1/2 is a single node
    let singletons: Vec<u32> = (0..n as u32).collect();
    let single = label_partition(g, &singletons, vec![true; n], code.as_ref());
    scales.push(Scale { i: -1, d: q(1, 2), diameter_bound: Q::zero(), partitions: vec![single; t as usize] });
    for i in 0..=top_scale(g) {
        let d = 1u64 << i;
        let cover = sparse_cover(o, g, d, Some(t), choice.reborrow(), check)?;
        let mut diameter_bound = Q::zero();
        let mut parts = Vec::with_capacity(t as usize);
        for (p, pad) in cover.partitions.iter().zip(cover.padded) {
            if p.diameter_bound > diameter_bound {
                diameter_bound = p.diameter_bound.clone();
            }
            parts.push(label_partition(g, &p.clustering.cluster_of, pad, code.as_ref()));
        }
        scales.push(Scale { i, d: pow(&qi(2), i as u32), diameter_bound, partitions: parts });
    }
    let mut provenance = Vec::new();
    let mut cols: Vec<Vec<u64>> = Vec::new();
    for (si, sc) in scales.iter().enumerate() {
        for (pi, part) in sc.partitions.iter().enumerate() {
            for bit in 0..code.len() {
                let s: Vec<bool> = (0..n).map(|v| !part.labels[part.cluster_of[v] as usize][bit]).collect();
                let col = if s.iter().any(|&x| x) {
                    o.potential(g, &s, &Q::one()).map_err(|_| EmbedError::Disconnected)?.into_iter().map(|x| x as u64).collect()
                } else {
                    vec![0; n]
                };
                cols.push(col);
                provenance.push(Coord { scale: si, partition: pi as u32, bit: bit as u32 });
            }
        }
    }
    let dims = cols.len();
    let x = (0..n).map(|v| cols.iter().map(|c| c[v]).collect()).collect();
    Ok(Embedding { dims, x, provenance, scales, t, code_name: code.name().into(), code_len: code.len(), code_distance: code.distance() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distortion {
    pub pairs: usize,
    pub exact: bool,
    /// max ||x_u - x_v|| / d(u, v)
    pub max_expansion: Q,
    pub expansion_witness: Option<(usize, usize)>,
    /// max d(u, v) / ||x_u - x_v||, None when some pair collapses
    pub max_contraction: Option<Q>,
    pub contraction_witness: Option<(usize, usize)>,
}

/// Exact all-pairs ratios up to `limit` nodes, else pairs (u, u + k) for a fixed stride.
pub fn distortion_report(g: &Graph, emb: &Embedding, limit: usize) -> Distortion {
    let n = g.n();
    let exact = n <= limit;
    let mut rep = Distortion { pairs: 0, exact, max_expansion: Q::zero(), expansion_witness: None, max_contraction: Some(Q::zero()), contraction_witness: None };
    let stride = if exact { 1 } else { n.div_ceil(limit) };
    for u in (0..n).step_by(stride) {
        let d = dist_from(g, None, u, None);
        for v in u + 1..n {
            let duv = match d[v] {
                Some(x) if x > 0 => x,
                _ => continue,
            };
            rep.pairs += 1;
            let l1 = emb.l1(u, v) as i128;
            let e = Q::new(l1.into(), duv.into());
            if e > rep.max_expansion {
                rep.max_expansion = e;
                rep.expansion_witness = Some((u, v));
            }
            if l1 == 0 {
                if rep.max_contraction.is_some() {
                    rep.max_contraction = None;
                    rep.contraction_witness = Some((u, v));
                }
            } else if let Some(c) = &rep.max_contraction {
                let r = Q::new(duv.into(), l1.into());
                if r > *c {
                    rep.max_contraction = Some(r);
                    rep.contraction_witness = Some((u, v));
                }
            }
        }
    }
    rep
}
