//! Exact and perturbed distance oracles side by side, checked against their contract.
//!
//! cargo run --release --example oracle_contracts -- [n] [seed]

use num_traits::Zero;

use lddkit::gen::{random_connected, Lengths};
use lddkit::graph::Subgraph;
use lddkit::oracles::{Delays, Mode, Oracles};
use lddkit::rational::{q, qi, Q};
use lddkit::verify::check_dist_forest;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&30) as usize;
    let seed = *args.get(1).unwrap_or(&4);
    let g = random_connected(n, n, Lengths { lo: 0, hi: 6 }, seed).unwrap();
    let sub = Subgraph::full(&g);
    let sources = [0, n / 2];
    let del = vec![Q::zero(); n];
    let d = qi(12);
    let eps = q(1, 2);
    for (name, mode) in [("exact", Mode::Exact), ("perturbed", Mode::Perturbed(seed))] {
        let f = Oracles::new(mode).dist(&g, &sub, &sources, Delays::Zero, &d, &eps).unwrap();
        check_dist_forest(&g, &sub, &sources, &del, &d, &eps, &f).unwrap();
        let total: i128 = (0..n).filter(|&v| f.member[v]).map(|v| f.df[v]).sum();
        println!("{:>9}: {} members, sum of forest depths {}", name, f.size(), total);
    }
}
