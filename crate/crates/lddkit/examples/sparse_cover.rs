//! Build a sparse cover of a random weighted graph and report padding counts.
//!
//! cargo run --release --example sparse_cover -- [n] [D] [seed]

use std::time::Instant;

use lddkit::clustering::sparse_cover;
use lddkit::gen::{random_connected, Lengths};
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, SelfCheck};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&100) as usize;
    let d = *args.get(1).unwrap_or(&4);
    let seed = *args.get(2).unwrap_or(&1);
    let g = random_connected(n, n / 2, Lengths { lo: 1, hi: 20 }, seed).unwrap();
    let o = Oracles::default();
    let start = Instant::now();
    let cover = sparse_cover(&o, &g, d, None, Choice::Det, SelfCheck::Fast).unwrap();
    let worst = (0..n).map(|v| cover.padded_count(v)).min().unwrap_or(0);
    let clusters: Vec<usize> = cover.partitions.iter().map(|p| p.clustering.clusters.len()).collect();
    println!("n = {}, m = {}, D = {}, t = {}", n, g.m(), d, cover.t);
    println!("fewest partitions padding a node: {} (need {})", worst, (2 * cover.t as usize).div_ceil(3));
    println!("clusters per partition: {:?}", clusters);
    println!("distance calls: {}, elapsed {:.2?}", o.stats().dist_calls, start.elapsed());
}
