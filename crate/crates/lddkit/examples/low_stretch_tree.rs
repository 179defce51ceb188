//! Low-stretch spanning tree of a random weighted graph, with the stretch report.
//!
//! cargo run --release --example low_stretch_tree -- [n] [seed]

use std::time::Instant;

use lddkit::gen::{random_connected, Lengths};
use lddkit::lsst::lsst;
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, SelfCheck};
use lddkit::rational::{fmt_q, to_f64};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&60) as usize;
    let seed = *args.get(1).unwrap_or(&3);
    let g = random_connected(n, n, Lengths { lo: 1, hi: 10 }, seed).unwrap();
    let mu = vec![1u64; g.m()];
    let o = Oracles::default();
    let start = Instant::now();
    let t = lsst(&o, &g, &mu, Choice::Det, SelfCheck::Fast).unwrap();
    let ratio = t.ratio().unwrap();
    println!("n = {}, m = {}, diameter = {}, levels = {}, eps = {}", n, g.m(), t.diameter, t.j, fmt_q(&t.eps));
    println!("tree cost {} / graph cost {} = {} ({:.3})", t.tree_cost, t.graph_cost, fmt_q(&ratio), to_f64(&ratio));
    for l in &t.levels {
        println!("  level {:>2}: {:>4} parts, {:>4} forest edges", l.j, l.parts.len(), l.forest.len());
    }
    println!("distance calls: {}, elapsed {:.2?}", o.stats().dist_calls, start.elapsed());
}
