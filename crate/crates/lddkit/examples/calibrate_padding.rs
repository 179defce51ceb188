//! Smallest starting constant c for which the padded partition never has to double c
//! on a fixed corpus of random weighted graphs.
//!
//! cargo run --release --example calibrate_padding -- [graphs] [max_n]

use lddkit::clustering::padded_partition;
use lddkit::gen::{random_connected, Lengths};
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, SelfCheck};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let graphs = *args.first().unwrap_or(&30);
    let max_n = *args.get(1).unwrap_or(&120) as usize;
    let corpus: Vec<_> = (0..graphs).map(|s| random_connected(2 + (s as usize * 37) % (max_n - 1), max_n / 3, Lengths { lo: 1, hi: 12 }, s).unwrap()).collect();
    for c in 1..=8u64 {
        let mut escalated = 0;
        let mut worst = 0f64;
        for g in &corpus {
            for d in [1u64, 4, 16] {
                let mu = vec![1u64; g.n()];
                let pp = padded_partition(&Oracles::default(), g, d, &mu, c, Choice::Det, SelfCheck::Off).unwrap();
                escalated += (pp.c != c) as usize;
                worst = worst.max(pp.bad_weight as f64 / pp.total_weight as f64);
            }
        }
        println!("c = {}: {} escalations over {} runs, worst bad fraction {:.3}", c, escalated, corpus.len() * 3, worst);
        if escalated == 0 {
            println!("smallest non-escalating c: {}", c);
            break;
        }
    }
}
