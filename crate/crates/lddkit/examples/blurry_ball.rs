//! Blurry ball growing from one source: deterministic budget and a few seeded runs.
//!
//! cargo run --release --example blurry_ball -- [n] [D] [seed]

use lddkit::blurry::{blur, default_eps};
use lddkit::gen::{random_connected, Lengths};
use lddkit::graph::Subgraph;
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, RngCoins, SelfCheck};
use lddkit::rational::{fmt_q, qu, to_f64};
use lddkit::verify::{check_blur, det_blur_budget};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&150) as usize;
    let d = qu(*args.get(1).unwrap_or(&64));
    let seed = *args.get(2).unwrap_or(&5);
    let g = random_connected(n, n, Lengths { lo: 1, hi: 8 }, seed).unwrap();
    let sub = Subgraph::full(&g);
    let mut s = vec![false; n];
    s[0] = true;
    let r = vec![2u64; n];
    let mu = vec![1u64; n];
    let eps = default_eps(n);
    let o = Oracles::default();

    let det = blur(&o, &g, &sub, &s, &r, &mu, &d, &eps, Choice::Det, SelfCheck::Full);
    check_blur(&g, &sub, &s, &det.s_sup, &det.bad, &r, &d).unwrap();
    let bad = det.bad.iter().filter(|&&b| b).count();
    let budget = det_blur_budget(&d, &eps, &mu, &r, &vec![true; n]);
    println!("n = {}, D = {}, eps = {}, levels = {}", n, fmt_q(&d), fmt_q(&eps), det.trace.len());
    println!("det: |S_sup| = {}, bad weight {} <= budget {} ({:.2})", det.s_sup.iter().filter(|&&x| x).count(), bad, fmt_q(&budget), to_f64(&budget));
    for l in &det.trace {
        println!("  D = {:>10.3} branch {}", to_f64(&l.d), l.branch);
    }
    for k in 0..4 {
        let mut coins = RngCoins::new(seed + k);
        let res = blur(&o, &g, &sub, &s, &r, &mu, &d, &eps, Choice::Rand(&mut coins), SelfCheck::Fast);
        let branches: String = res.trace.iter().map(|l| char::from(b'0' + l.branch)).collect();
        println!("rand seed {}: |S_sup| = {}, bad = {}, branches {}", seed + k, res.s_sup.iter().filter(|&&x| x).count(), res.bad.iter().filter(|&&x| x).count(), branches);
    }
}
