//! Edge-cutting clustering around random terminals with the cut weight against its bound.
//!
//! cargo run --release --example edge_cutting -- [n] [terminals] [seed]

use num_traits::Zero;

use lddkit::clustering::edge_cutting;
use lddkit::clustering::edgecut::EdgeCutInput;
use lddkit::gen::{random_connected, Lengths};
use lddkit::graph::Subgraph;
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, SelfCheck};
use lddkit::rational::{fmt_q, q, to_f64, Q};
use lddkit::verify::sp_delayed;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&80) as usize;
    let k = *args.get(1).unwrap_or(&5) as usize;
    let seed = *args.get(2).unwrap_or(&1);
    let g = random_connected(n, n / 2, Lengths { lo: 1, hi: 9 }, seed).unwrap();
    let mut terminals = vec![false; n];
    for j in 0..k {
        terminals[(j * 7919) % n] = true;
    }
    let del = vec![Q::zero(); n];
    let src: Vec<(usize, Q)> = (0..n).filter(|&v| terminals[v]).map(|v| (v, Q::zero())).collect();
    let ruling = sp_delayed(&g, &vec![true; n], None, &src).into_iter().flatten().max().unwrap();
    let mu = vec![1u64; g.m()];
    let h = Subgraph::full(&g);
    let inp = EdgeCutInput { h: &h, mu: &mu, q: &terminals, del: &del, ruling: ruling.clone(), eps: q(1, 2) };
    let ec = edge_cutting(&Oracles::default(), &g, &inp, Choice::Det, SelfCheck::Fast).unwrap();
    println!("n = {}, m = {}, terminals = {}, R = {}", n, g.m(), k, fmt_q(&ruling));
    println!("{} clusters, {} cut edges", ec.clusters.len(), ec.cut.len());
    println!("distance slack {:.4} <= eps R = {}", to_f64(&ec.slack), fmt_q(&(q(1, 2) * &ruling)));
    if let Some(b) = &ec.cut_bound {
        println!("cut weight {} <= bound {:.1}", ec.cut.len(), to_f64(b));
    }
}
