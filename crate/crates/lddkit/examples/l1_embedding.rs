//! l1 embedding of a weighted cycle with its exact distortion and lower-bound certificate.
//!
//! cargo run --release --example l1_embedding -- [n] [raw|repetition]

use lddkit::embed::{distortion_report, l1_embed, Labeling};
use lddkit::gen::{cycle, Lengths};
use lddkit::oracles::Oracles;
use lddkit::params::{Choice, SelfCheck};
use lddkit::rational::to_f64;
use lddkit::verify::check_embedding;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(40, |a| a.parse().expect("numeric argument"));
    let lab = match args.next().as_deref() {
        Some("repetition") => Labeling::Repetition,
        _ => Labeling::Raw,
    };
    let g = cycle(n, Lengths { lo: 1, hi: 4 }, 7).unwrap();
    let emb = l1_embed(&Oracles::default(), &g, lab, Choice::Det, SelfCheck::Fast).unwrap();
    let cert = check_embedding(&g, &emb, lab).unwrap();
    let d = distortion_report(&g, &emb, 256);
    println!("n = {}, dims = {}, scales = {}, t = {}, code {} (len {}, distance {})", n, emb.dims, emb.scales.len(), emb.t, emb.code_name, emb.code_len, emb.code_distance);
    println!("max expansion {:.2}, max contraction {:.4}", to_f64(&d.max_expansion), d.max_contraction.as_ref().map_or(f64::INFINITY, to_f64));
    println!("certified pairs {}, min certified ratio {:.3}", cert.pairs, cert.min_certified_ratio.as_ref().map_or(0.0, to_f64));
    let scale = to_f64(&d.max_expansion) * d.max_contraction.as_ref().map_or(f64::INFINITY, to_f64);
    println!("distortion {:.2}", scale);
}
