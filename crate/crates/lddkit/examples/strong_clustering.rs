//! Strong-diameter clustering of an unweighted path or grid, phase by phase.
//!
//! cargo run --release --example strong_clustering -- [n] [rows]

use lddkit::gen::{grid, Lengths};
use lddkit::oracles::Oracles;
use lddkit::strong::strong_cluster;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = *args.first().unwrap_or(&400);
    let rows = (*args.get(1).unwrap_or(&1)).max(1);
    let g = grid(rows, n.div_ceil(rows), Lengths::UNIT, 0).unwrap();
    let o = Oracles::default();
    let sc = strong_cluster(&g, &o).unwrap();
    println!("n = {}, m = {}, b = {}, radius bound 6b^2 = {}", g.n(), g.m(), sc.b, 6 * sc.b * sc.b);
    for p in &sc.phases {
        println!("  phase {:>2}: j* = {:>3}, deleted {:>3}", p.i, p.j_star, p.deleted.len());
    }
    let radius = sc.clusters.iter().map(|c| tree_depth(&c.tree_edges, c.center)).max().unwrap_or(0);
    println!("{} clusters, {} nodes unclustered, largest tree depth {}", sc.clusters.len(), sc.unclustered.len(), radius);
    println!("count oracle calls: {}", o.stats().count_calls);
}

fn tree_depth(edges: &[(usize, usize)], center: usize) -> usize {
    let parent: std::collections::HashMap<usize, usize> = edges.iter().copied().collect();
    parent
        .keys()
        .map(|&v| {
            let (mut x, mut d) = (v, 0);
            while x != center {
                x = parent[&x];
                d += 1;
            }
            d
        })
        .max()
        .unwrap_or(0)
}
