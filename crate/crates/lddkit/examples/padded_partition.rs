//! Padded partition at scale D on a weighted grid: bad weight, padding and diameter bound.
//!
//! cargo run --release --example padded_partition -- [side] [D]

use lddkit::clustering::padded::padded_nodes;
use lddkit::clustering::{padded_partition, padded::DEFAULT_PADDING_C};
use lddkit::gen::{grid, Lengths};
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, SelfCheck};
use lddkit::rational::{fmt_q, to_f64};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let side = *args.first().unwrap_or(&12) as usize;
    let d = *args.get(1).unwrap_or(&2);
    let g = grid(side, side, Lengths { lo: 1, hi: 3 }, 2).unwrap();
    let mu = vec![1u64; g.n()];
    let pp = padded_partition(&Oracles::default(), &g, d, &mu, DEFAULT_PADDING_C, Choice::Det, SelfCheck::Fast).unwrap();
    let padded = padded_nodes(&g, &pp.clustering.cluster_of, d).iter().filter(|&&p| p).count();
    println!("n = {}, D = {}, c = {}, D_steroids = {}", g.n(), d, pp.c, fmt_q(&pp.d_steroids));
    println!("{} clusters, bad weight {} of {}, padded nodes {}", pp.clustering.clusters.len(), pp.bad_weight, pp.total_weight, padded);
    println!("diameter bound {:.1}", to_f64(&pp.diameter_bound));
}
