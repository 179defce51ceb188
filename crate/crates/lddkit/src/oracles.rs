//! Distance, aggregation, counting and potential oracles, with call accounting.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{components, sssp_core, Graph, Subgraph, NONE};
use crate::rational::{fmt_q, qi, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("source set is empty")]
    EmptySources,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("distance parameter must be non-negative")]
    NegativeDistance,
    #[error("negative delay at node {0}")]
    NegativeDelay(usize),
    #[error("count vectors must have length 3b = {expected}, node {node} has {got}")]
    BadIndexSet { node: usize, expected: usize, got: usize },
    #[error("aggregate overflow")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Non-shortest but contract-satisfying forests, driven by a seed.
    Perturbed(u64),
}

/// Per-node delays, read only on source nodes.
#[derive(Debug, Clone, Copy)]
pub enum Delays<'a> {
    Zero,
    Int(&'a [i128]),
    Rat(&'a [Q]),
}

impl<'a> Delays<'a> {
    pub fn get(&self, v: usize) -> Q {
        match self {
            Delays::Zero => Q::zero(),
            Delays::Int(x) => qi(x[v]),
            Delays::Rat(x) => x[v].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    pub member: Vec<bool>,
    pub parent: Vec<u32>,
    pub parent_edge: Vec<u32>,
    pub root: Vec<u32>,
    /// forest distance to the root, true lengths
    pub df: Vec<i128>,
    /// members with parents before children
    pub order: Vec<u32>,
}

impl RootedForest {
    pub fn size(&self) -> usize {
        self.order.len()
    }
    pub fn is_root(&self, v: usize) -> bool {
        self.member[v] && self.parent[v] == NONE
    }
    pub fn parent_of(&self, v: usize) -> Option<usize> {
        if self.member[v] && self.parent[v] != NONE {
            Some(self.parent[v] as usize)
        } else {
            None
        }
    }
    pub fn root_of(&self, v: usize) -> Option<usize> {
        if self.member[v] {
            Some(self.root[v] as usize)
        } else {
            None
        }
    }

    fn from_sssp<T>(g: &Graph, s: &crate::graph::Sssp<T>) -> RootedForest {
        let n = g.n();
        let member: Vec<bool> = s.dist.iter().map(|d| d.is_some()).collect();
        let mut df = vec![0i128; n];
        for &v in &s.order {
            let v = v as usize;
            if s.pred[v] != NONE {
                let p = s.pred[v] as usize;
                df[v] = df[p] + g.edge(s.pred_edge[v] as usize).len as i128;
            }
        }
        RootedForest {
            member,
            parent: s.pred.clone(),
            parent_edge: s.pred_edge.clone(),
            root: s.src.clone(),
            df,
            order: s.order.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub dist_calls: u64,
    pub forest_agg_calls: u64,
    pub global_agg_calls: u64,
    pub pot_calls: u64,
    pub count_calls: u64,
    pub max_distance_param: Option<Q>,
    pub min_precision: Option<Q>,
}

impl OracleStats {
    pub fn to_json(&self) -> Value {
        json!({
            "dist_calls": self.dist_calls,
            "forest_agg_calls": self.forest_agg_calls,
            "global_agg_calls": self.global_agg_calls,
            "pot_calls": self.pot_calls,
            "count_calls": self.count_calls,
            "max_distance_param": self.max_distance_param.as_ref().map(fmt_q),
            "min_precision": self.min_precision.as_ref().map(fmt_q),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggOp {
    Sum,
    Min,
}

/// Identity of the min-aggregate over an empty set.
pub const MIN_IDENTITY: i128 = i64::MAX as i128;

/// Oracle front-end. One instance per run; the stats are the only shared state.
#[derive(Debug)]
pub struct Oracles {
    pub mode: Mode,
    stats: Mutex<OracleStats>,
    powers: Mutex<HashMap<Q, UpPowers>>,
}

impl Default for Oracles {
    fn default() -> Self {
        Oracles::new(Mode::Exact)
    }
}

impl Oracles {
    pub fn new(mode: Mode) -> Oracles {
        Oracles { mode, stats: Mutex::new(OracleStats::default()), powers: Mutex::new(HashMap::new()) }
    }

    pub fn stats(&self) -> OracleStats {
        self.stats.lock().unwrap().clone()
    }

    fn note_dist(&self, d: &Q, eps: &Q) {
        let mut s = self.stats.lock().unwrap();
        s.dist_calls += 1;
        if s.max_distance_param.as_ref().map_or(true, |m| d > m) {
            s.max_distance_param = Some(d.clone());
        }
        if s.min_precision.as_ref().map_or(true, |m| eps < m) {
            s.min_precision = Some(eps.clone());
        }
    }

    /// O^Dist: a forest F rooted in S with del(root)+dF <= (1+eps) d_del(S,v) and
    /// <= (1+eps) D on members, containing every v with d_del(S,v) <= D.
    pub fn dist(
        &self,
        g: &Graph,
        sub: &Subgraph,
        sources: &[usize],
        del: Delays,
        d: &Q,
        eps: &Q,
    ) -> Result<RootedForest, OracleError> {
        if sources.is_empty() {
            return Err(OracleError::EmptySources);
        }
        if d.is_negative() {
            return Err(OracleError::NegativeDistance);
        }
        for &s in sources {
            let neg = match del {
                Delays::Zero => false,
                Delays::Int(x) => x[s] < 0,
                Delays::Rat(x) => x[s].is_negative(),
            };
            if neg {
                return Err(OracleError::NegativeDelay(s));
            }
        }
        self.note_dist(d, eps);
        let seq = self.stats.lock().unwrap().dist_calls;
        match self.mode {
            Mode::Exact => Ok(exact_forest(g, sub, sources, del, d)),
            Mode::Perturbed(seed) if eps.is_positive() => {
                let third = eps / qi(3);
                let mut tables = self.powers.lock().unwrap();
                let powers = tables.entry(third.clone()).or_insert_with(|| UpPowers::new(&third));
                Ok(perturbed_forest(g, sub, sources, del, d, eps, seed ^ seq.wrapping_mul(0x9E37_79B9_7F4A_7C15), powers))
            }
            Mode::Perturbed(_) => Ok(exact_forest(g, sub, sources, del, d)),
        }
    }

    /// Ancestor and descendant aggregates of x over F, v itself excluded.
    pub fn forest_agg(&self, f: &RootedForest, x: &[i64], op: AggOp) -> Vec<(i128, i128)> {
        self.stats.lock().unwrap().forest_agg_calls += 1;
        forest_agg_raw(f, x, op)
    }

    pub fn global_agg(&self, x: &[i128]) -> Result<i128, OracleError> {
        self.stats.lock().unwrap().global_agg_calls += 1;
        x.iter().try_fold(0i128, |a, &b| a.checked_add(b)).ok_or(OracleError::Overflow)
    }

    /// O^count: x[v][k] is the bit for index j = 2k, k in 0..3b. Sums over alive nodes.
    pub fn count(&self, sub: &Subgraph, b: u32, x: &[Vec<bool>]) -> Result<Vec<u64>, OracleError> {
        self.stats.lock().unwrap().count_calls += 1;
        let len = 3 * b as usize;
        let mut tot = vec![0u64; len];
        for v in sub.nodes() {
            if x[v].len() != len {
                return Err(OracleError::BadIndexSet { node: v, expected: len, got: x[v].len() });
            }
            for (k, &bit) in x[v].iter().enumerate() {
                tot[k] += bit as u64;
            }
        }
        Ok(tot)
    }

    /// O^Pot: the exact potential phi = d(S, .).
    pub fn potential(&self, g: &Graph, s: &[bool], eps: &Q) -> Result<Vec<i128>, OracleError> {
        {
            let mut st = self.stats.lock().unwrap();
            st.pot_calls += 1;
            if st.min_precision.as_ref().map_or(true, |m| eps < m) {
                st.min_precision = Some(eps.clone());
            }
        }
        if !s.iter().any(|&x| x) {
            return Err(OracleError::EmptySources);
        }
        let full = Subgraph::full(g);
        if components(g, &full).1 != 1 {
            return Err(OracleError::Disconnected);
        }
        let d = crate::graph::dist_from_set(g, None, s, None);
        Ok(d.into_iter().map(|x| x.expect("connected")).collect())
    }
}

pub fn forest_agg_raw(f: &RootedForest, x: &[i64], op: AggOp) -> Vec<(i128, i128)> {
    let n = f.member.len();
    let (ident, comb): (i128, fn(i128, i128) -> i128) = match op {
        AggOp::Sum => (0, |a, b| a + b),
        AggOp::Min => (MIN_IDENTITY, |a, b| a.min(b)),
    };
    let mut anc = vec![ident; n];
    let mut desc = vec![ident; n];
    for &v in &f.order {
        let v = v as usize;
        if let Some(p) = f.parent_of(v) {
            anc[v] = comb(anc[p], x[p] as i128);
        }
    }
    for &v in f.order.iter().rev() {
        let v = v as usize;
        if let Some(p) = f.parent_of(v) {
            desc[p] = comb(desc[p], comb(desc[v], x[v] as i128));
        }
    }
    (0..n).map(|v| (anc[v], desc[v])).collect()
}

/// Denominator LCM of the source delays.
fn delay_scale(sources: &[usize], del: &Delays) -> BigInt {
    match del {
        Delays::Rat(x) => {
            let mut l = BigInt::one();
            for &s in sources {
                l = crate::rational::lcm(&l, x[s].denom());
            }
            l
        }
        _ => BigInt::one(),
    }
}

/// Source delays as integers over the common denominator l.
fn scaled_delays(sources: &[usize], del: &Delays, l: &BigInt) -> Vec<(usize, BigInt)> {
    sources
        .iter()
        .map(|&s| {
            let x = match del {
                Delays::Zero => BigInt::zero(),
                Delays::Int(x) => l * BigInt::from(x[s]),
                Delays::Rat(x) => x[s].numer() * (l / x[s].denom()),
            };
            (s, x)
        })
        .collect()
}

fn exact_forest(g: &Graph, sub: &Subgraph, sources: &[usize], del: Delays, d: &Q) -> RootedForest {
    let l = delay_scale(sources, &del);
    let scaled = scaled_delays(sources, &del, &l);
    let cap = (d * Q::from_integer(l.clone())).floor().to_integer();
    let total_len: u128 = g.edges().iter().map(|e| e.len as u128).sum();
    let max_del = scaled.iter().map(|(_, x)| x.abs()).max().unwrap_or_default();
    let budget = &max_del + &l * BigInt::from(total_len) + cap.abs();
    if budget.bits() < 120 {
        let li = l.to_i128().unwrap();
        let init: Vec<(usize, i128)> = scaled.iter().map(|(s, x)| (*s, x.to_i128().unwrap())).collect();
        let cap = cap.to_i128().unwrap();
        let r = sssp_core(g, Some(sub), init, Some(&cap), |x, e| x + li * g.edge(e).len as i128);
        RootedForest::from_sssp(g, &r)
    } else {
        let r = sssp_core(g, Some(sub), scaled, Some(&cap), |x, e| x + &l * BigInt::from(g.edge(e).len));
        RootedForest::from_sssp(g, &r)
    }
}

/// Upward rounding of powers of a number close to 1, kept as fixed-point
/// numerators over 2^bits.
#[derive(Debug)]
struct UpPowers {
    bits: usize,
    base: BigInt,
    cache: HashMap<u64, BigInt>,
}

impl UpPowers {
    fn new(third: &Q) -> UpPowers {
        // enough fractional bits to resolve eps/3, plus 64
        let bits = 64 + third.recip().to_integer().bits() as usize;
        let base = ((Q::one() + third) * Q::from_integer(BigInt::one() << bits)).ceil().to_integer();
        UpPowers { bits, base, cache: HashMap::new() }
    }

    fn mul_up(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let mask = (BigInt::one() << self.bits) - 1;
        (x * y + mask) >> self.bits
    }

    /// base^k, never below the true value.
    fn pow(&self, mut k: u64) -> BigInt {
        let mut acc = BigInt::one() << self.bits;
        let mut sq = self.base.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_up(&acc, &sq);
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul_up(&sq, &sq);
            }
        }
        acc
    }

    /// Smallest power of the base that is >= len, for len >= 1, as a
    /// numerator over 2^bits.
    fn round_up(&mut self, len: u64) -> BigInt {
        if let Some(x) = self.cache.get(&len) {
            return x.clone();
        }
        let one = BigInt::one() << self.bits;
        let target = BigInt::from(len) << self.bits;
        let step = Q::new(&self.base - &one, one.clone()).to_f64().unwrap_or(f64::MIN_POSITIVE).ln_1p();
        let mut k = ((len as f64).ln() / step).ceil().max(0.0) as u64;
        while self.pow(k) < target {
            k += 1;
        }
        while k > 0 && self.pow(k - 1) >= target {
            k -= 1;
        }
        let x = self.pow(k);
        self.cache.insert(len, x.clone());
        x
    }
}

fn perturbed_forest(
    g: &Graph,
    sub: &Subgraph,
    sources: &[usize],
    del: Delays,
    d: &Q,
    eps: &Q,
    seed: u64,
    powers: &mut UpPowers,
) -> RootedForest {
    let third = eps / qi(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // every label is an integer over l * 2^bits
    let l = delay_scale(sources, &del);
    let unit = &l << powers.bits;
    let rounded: Vec<BigInt> = g
        .edges()
        .iter()
        .map(|e| {
            let pick: bool = rng.gen();
            if e.len == 0 || !pick {
                &unit * BigInt::from(e.len)
            } else {
                &l * powers.round_up(e.len)
            }
        })
        .collect();
    let cap = ((Q::one() + &third) * d * Q::from_integer(unit.clone())).floor().to_integer();
    let scaled = scaled_delays(sources, &del, &l);
    let init: Vec<(usize, BigInt)> = scaled.iter().map(|(s, x)| (*s, x << powers.bits)).collect();
    let r = sssp_core(g, Some(sub), init, Some(&cap), |x, e| x + &rounded[e]);
    let forest = RootedForest::from_sssp(g, &r);

    // restore property 1 if it fails anywhere (it cannot, but the check is cheap)
    let mut del_l = vec![BigInt::zero(); g.n()];
    for (s, x) in &scaled {
        del_l[*s] = x.clone();
    }
    let exact = sssp_core(g, Some(sub), scaled, None, |x, e| x + &l * BigInt::from(g.edge(e).len)).dist;
    let (a, b) = (eps.numer() + eps.denom(), eps.denom().clone());
    let cap_l = ((Q::one() + eps) * d * Q::from_integer(l.clone())).floor().to_integer();
    let ok = forest.order.iter().all(|&v| {
        let v = v as usize;
        let lhs = &del_l[forest.root[v] as usize] + &l * BigInt::from(forest.df[v]);
        match &exact[v] {
            Some(dv) => &b * &lhs <= &a * dv && lhs <= cap_l,
            None => false,
        }
    });
    if ok {
        forest
    } else {
        exact_forest(g, sub, sources, del, d)
    }
}

/// Exact d_del(S, v) as rationals, no cap.
pub fn exact_distances(g: &Graph, sub: &Subgraph, sources: &[usize], del: Delays) -> Vec<Option<Q>> {
    let l = delay_scale(sources, &del);
    let scaled = scaled_delays(sources, &del, &l);
    let r = sssp_core(g, Some(sub), scaled, None, |x, e| x + &l * BigInt::from(g.edge(e).len));
    r.dist.into_iter().map(|x| x.map(|x| Q::new(x, l.clone()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn path(lens: &[u64]) -> Graph {
        let e: Vec<_> = lens.iter().enumerate().map(|(i, &l)| (i, i + 1, l)).collect();
        Graph::new(lens.len() + 1, &e).unwrap()
    }

    #[test]
    fn all_sources_isolated_roots() {
        let g = path(&[1, 1]);
        let o = Oracles::default();
        let f = o.dist(&g, &Subgraph::full(&g), &[0, 1, 2], Delays::Zero, &qi(5), &q(1, 10)).unwrap();
        assert!((0..3).all(|v| f.is_root(v) && f.df[v] == 0));
    }

    #[test]
    fn truncation_at_d() {
        let g = path(&[1, 1]);
        let o = Oracles::default();
        let f = o.dist(&g, &Subgraph::full(&g), &[0], Delays::Zero, &qi(1), &q(1, 10)).unwrap();
        assert_eq!(f.member, vec![true, true, false]);
        assert_eq!(f.df[1], 1);
        assert_eq!(o.stats().dist_calls, 1);
        assert_eq!(o.stats().max_distance_param, Some(qi(1)));
    }

    #[test]
    fn rational_delays_threshold() {
        let g = path(&[2]);
        let del = vec![q(1, 3), q(0, 1)];
        let o = Oracles::default();
        // d(1) = 1/3 + 2 = 7/3 > 2; with D = 7/3 it is included
        let f = o.dist(&g, &Subgraph::full(&g), &[0], Delays::Rat(&del), &qi(2), &Q::zero()).unwrap();
        assert!(!f.member[1]);
        let f = o.dist(&g, &Subgraph::full(&g), &[0], Delays::Rat(&del), &q(7, 3), &Q::zero()).unwrap();
        assert!(f.member[1]);
    }

    #[test]
    fn empty_sources_error() {
        let g = path(&[1]);
        let o = Oracles::default();
        assert_eq!(
            o.dist(&g, &Subgraph::full(&g), &[], Delays::Zero, &qi(1), &Q::zero()).unwrap_err(),
            OracleError::EmptySources
        );
    }

    #[test]
    fn forest_agg_chain() {
        let g = path(&[1, 1]);
        let o = Oracles::default();
        let f = o.dist(&g, &Subgraph::full(&g), &[0], Delays::Zero, &qi(10), &Q::zero()).unwrap();
        let a = o.forest_agg(&f, &[1, 2, 3], AggOp::Sum);
        assert_eq!(a[2].0, 3);
        assert_eq!(a[0].1, 5);
        let single = o.forest_agg(&f, &[5, 5, 5], AggOp::Min);
        assert_eq!(single[0], (MIN_IDENTITY, 5));
        assert_eq!(single[2], (5, MIN_IDENTITY));
    }

    #[test]
    fn forest_agg_single_root() {
        let g = Graph::new(1, &[]).unwrap();
        let o = Oracles::default();
        let f = o.dist(&g, &Subgraph::full(&g), &[0], Delays::Zero, &qi(1), &Q::zero()).unwrap();
        assert_eq!(o.forest_agg(&f, &[5], AggOp::Sum)[0], (0, 0));
    }

    #[test]
    fn count_and_global() {
        let g = Graph::new(3, &[]).unwrap();
        let sub = Subgraph::full(&g);
        let o = Oracles::default();
        let mut x = vec![vec![false; 3]; 3];
        assert_eq!(o.count(&sub, 1, &x).unwrap(), vec![0, 0, 0]);
        x[1][0] = true;
        assert_eq!(o.count(&sub, 1, &x).unwrap(), vec![1, 0, 0]);
        assert_eq!(o.global_agg(&[1, 1, 1]).unwrap(), 3);
        assert!(o.count(&sub, 2, &x).is_err());
    }

    #[test]
    fn potential_single_edge() {
        let g = path(&[7]);
        let o = Oracles::default();
        let phi = o.potential(&g, &[true, false], &Q::zero()).unwrap();
        assert_eq!(phi, vec![0, 7]);
        let phi = o.potential(&g, &[true, true], &Q::zero()).unwrap();
        assert_eq!(phi, vec![0, 0]);
        let h = Graph::new(2, &[]).unwrap();
        assert_eq!(o.potential(&h, &[true, false], &Q::zero()).unwrap_err(), OracleError::Disconnected);
    }

    #[test]
    fn perturbed_includes_slack_nodes() {
        // node 1 at distance 10 > D = 9.9 is still allowed in under the (1+eps/3) slack
        let g = path(&[10]);
        let o = Oracles::new(Mode::Perturbed(1));
        let f = o.dist(&g, &Subgraph::full(&g), &[0], Delays::Zero, &q(99, 10), &q(1, 2)).unwrap();
        assert!(f.member[1]);
    }
}
