//! Graph generators for benchmarks and tests. All take an explicit seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, GraphError};

/// Inclusive edge length range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lengths {
    pub lo: u64,
    pub hi: u64,
}

impl Lengths {
    pub const UNIT: Lengths = Lengths { lo: 1, hi: 1 };

    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        if self.lo >= self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn finish(n: usize, edges: Vec<(usize, usize, u64)>) -> Result<Graph, GraphError> {
    Graph::build(n, (0..n as u64).collect(), None, &edges, 64)
}

pub fn path(n: usize, len: Lengths, seed: u64) -> Result<Graph, GraphError> {
    let mut r = rng(seed);
    finish(n, (1..n).map(|v| (v - 1, v, len.draw(&mut r))).collect())
}

pub fn cycle(n: usize, len: Lengths, seed: u64) -> Result<Graph, GraphError> {
    let mut r = rng(seed);
    let mut e: Vec<_> = (1..n).map(|v| (v - 1, v, len.draw(&mut r))).collect();
    if n >= 3 {
        e.push((n - 1, 0, len.draw(&mut r)));
    }
    finish(n, e)
}

pub fn grid(rows: usize, cols: usize, len: Lengths, seed: u64) -> Result<Graph, GraphError> {
    let mut r = rng(seed);
    let mut e = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                e.push((v, v + 1, len.draw(&mut r)));
            }
            if i + 1 < rows {
                e.push((v, v + cols, len.draw(&mut r)));
            }
        }
    }
    finish(rows * cols, e)
}

pub fn hypercube(dim: u32, len: Lengths, seed: u64) -> Result<Graph, GraphError> {
    let mut r = rng(seed);
    let n = 1usize << dim;
    let mut e = Vec::new();
    for v in 0..n {
        for k in 0..dim {
            let w = v ^ (1 << k);
            if v < w {
                e.push((v, w, len.draw(&mut r)));
            }
        }
    }
    finish(n, e)
}

/// G(n, p), possibly disconnected.
pub fn erdos_renyi(n: usize, p: f64, len: Lengths, seed: u64) -> Result<Graph, GraphError> {
    let mut r = rng(seed);
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p.clamp(0.0, 1.0)) {
                e.push((u, v, len.draw(&mut r)));
            }
        }
    }
    finish(n, e)
}

/// Uniform random recursive tree.
pub fn random_tree(n: usize, len: Lengths, seed: u64) -> Result<Graph, GraphError> {
    let mut r = rng(seed);
    let mut e = Vec::new();
    for v in 1..n {
        let p = r.gen_range(0..v);
        e.push((p, v, len.draw(&mut r)));
    }
    finish(n, e)
}

/// Random tree plus `extra` random edges, with node labels shuffled; always connected.
pub fn random_connected(n: usize, extra: usize, len: Lengths, seed: u64) -> Result<Graph, GraphError> {
    let mut r = rng(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut r);
    let mut e = Vec::new();
    for v in 1..n {
        let p = r.gen_range(0..v);
        e.push((perm[p], perm[v], len.draw(&mut r)));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = r.gen_range(0..n);
            let v = r.gen_range(0..n);
            if u != v {
                e.push((u, v, len.draw(&mut r)));
            }
        }
    }
    finish(n, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{components, Subgraph};

    #[test]
    fn shapes() {
        assert_eq!(cycle(5, Lengths::UNIT, 0).unwrap().m(), 5);
        assert_eq!(grid(3, 4, Lengths::UNIT, 0).unwrap().m(), 17);
        assert_eq!(hypercube(3, Lengths::UNIT, 0).unwrap().m(), 12);
        assert_eq!(random_tree(10, Lengths::UNIT, 1).unwrap().m(), 9);
    }

    #[test]
    fn connected_generator_is_connected() {
        for seed in 0..20 {
            let g = random_connected(30, 10, Lengths { lo: 1, hi: 9 }, seed).unwrap();
            assert_eq!(components(&g, &Subgraph::full(&g)).1, 1);
        }
    }

    #[test]
    fn same_seed_same_graph() {
        let a = erdos_renyi(40, 0.1, Lengths { lo: 1, hi: 5 }, 7).unwrap();
        let b = erdos_renyi(40, 0.1, Lengths { lo: 1, hi: 5 }, 7).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}
