//! Star decomposition of a random weighted graph rooted at node 0.
//!
//! cargo run --release --example star_decomposition -- [n] [seed]

use lddkit::gen::{random_connected, Lengths};
use lddkit::lsst::{star_decompose, Part};
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, SelfCheck};
use lddkit::rational::{q, qi};
use lddkit::verify::{check_star, sp};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&100) as usize;
    let seed = *args.get(1).unwrap_or(&2);
    let g = random_connected(n, n / 2, Lengths { lo: 1, hi: 10 }, seed).unwrap();
    let ecc = sp(&g, &vec![true; n], None, &[0], None).into_iter().flatten().max().unwrap();
    let parts = vec![Part { root: 0, nodes: (0..n).collect() }];
    let mu = vec![1u64; g.m()];
    let sd = star_decompose(&Oracles::default(), &g, &parts, &qi(ecc), &mu, &q(1, 10), Choice::Det, SelfCheck::Fast).unwrap();
    check_star(&g, &parts, &sd).unwrap();
    let star = &sd.stars[0];
    println!("n = {}, R = {}, center {} nodes, {} satellites, cut weight {}", n, ecc, star.center.len(), star.satellites.len(), sd.cut_weight);
    for s in star.satellites.iter().take(10) {
        println!("  satellite root {:>3} via bridge {:>3} from {:>3}: {} nodes", s.root, s.bridge, s.anchor, s.nodes.len());
    }
}
