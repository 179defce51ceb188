use num_traits::Zero;
use proptest::prelude::*;

use lddkit::blurry::{blur, default_eps, exact_blur};
use lddkit::clustering::padded::padded_nodes;
use lddkit::clustering::{padded_partition, steroids, SteroidsInput};
use lddkit::embed::{l1_embed, Labeling};
use lddkit::gen::{self, Lengths};
use lddkit::graph::{parse_graph, Graph, Subgraph};
use lddkit::lsst::lsst;
use lddkit::oracles::{Delays, Mode, Oracles};
use lddkit::params::{eps_log, Choice, FixedCoins, RngCoins, SelfCheck};
use lddkit::rational::{fmt_q, parse_q, q, qi, Q};
use lddkit::strong::strong_cluster;
use lddkit::verify::{self, ClusterSpec};

fn graph(n: usize, extra: usize, hi: u64, seed: u64) -> Graph {
    gen::random_connected(n, extra, Lengths { lo: 1, hi }, seed).unwrap()
}

fn mask(n: usize, bits: &[bool]) -> Vec<bool> {
    let mut s: Vec<bool> = (0..n).map(|v| bits[v % bits.len()]).collect();
    if !s.iter().any(|&x| x) {
        s[0] = true;
    }
    s
}

fn weights(n: usize, w: &[u64]) -> Vec<u64> {
    (0..n).map(|v| w[v % w.len()]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_text_roundtrip(n in 1usize..60, extra in 0usize..60, seed in any::<u64>()) {
        let g = graph(n, extra, 20, seed);
        let h = parse_graph(&g.to_text()).unwrap();
        prop_assert_eq!(g.to_text(), h.to_text());
    }

    #[test]
    fn rational_text_roundtrip(a in -10_000i64..10_000, b in 1i64..10_000) {
        let x = q(a, b);
        prop_assert_eq!(parse_q(&fmt_q(&x)), Some(x));
    }

    #[test]
    fn dist_oracle_meets_contract(
        n in 1usize..50, extra in 0usize..50, seed in any::<u64>(),
        bits in prop::collection::vec(any::<bool>(), 1..8),
        delays in prop::collection::vec(0i64..20, 1..8),
        d in 0i128..60, eps_den in 1i64..20, perturbed in any::<bool>(),
    ) {
        let g = graph(n, extra, 9, seed);
        let sub = Subgraph::full(&g);
        let s = mask(n, &bits);
        let sources: Vec<usize> = (0..n).filter(|&v| s[v]).collect();
        let del: Vec<Q> = (0..n).map(|v| q(delays[v % delays.len()], 3)).collect();
        let eps = q(1, eps_den);
        let mode = if perturbed { Mode::Perturbed(seed) } else { Mode::Exact };
        let f = Oracles::new(mode).dist(&g, &sub, &sources, Delays::Rat(&del), &qi(d), &eps).unwrap();
        verify::check_dist_forest(&g, &sub, &sources, &del, &qi(d), &eps, &f).unwrap();
    }

    #[test]
    fn potential_oracle_is_exact(n in 1usize..60, extra in 0usize..60, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 1..8)) {
        let g = graph(n, extra, 12, seed);
        let s = mask(n, &bits);
        let eps = q(1, 4);
        let phi = Oracles::default().potential(&g, &s, &eps).unwrap();
        verify::check_potential(&g, &s, &eps, &phi).unwrap();
    }

    #[test]
    fn exact_blur_grows_monotonically(n in 1usize..60, extra in 0usize..40, seed in any::<u64>(), d in 2i128..64, coins in any::<u64>()) {
        let g = graph(n, extra, 6, seed);
        let mut s = vec![false; n];
        s[seed as usize % n] = true;
        let out = exact_blur(&g, &s, &qi(d), &mut FixedCoins::from_mask(coins, 64));
        prop_assert!((0..n).all(|v| !s[v] || out[v]));
        let far = verify::sp(&g, &vec![true; n], None, &[seed as usize % n], None);
        prop_assert!((0..n).all(|v| !out[v] || far[v].unwrap() < d));
    }

    #[test]
    fn blur_is_good_and_within_budget(
        n in 1usize..80, extra in 0usize..60, seed in any::<u64>(),
        bits in prop::collection::vec(prop::bool::weighted(0.2), 1..8),
        radii in prop::collection::vec(0u64..6, 1..8),
        mu in prop::collection::vec(0u64..10, 1..8),
        d in 2i128..100, rand in any::<bool>(),
    ) {
        let g = graph(n, extra, 8, seed);
        let sub = Subgraph::full(&g);
        let s = mask(n, &bits);
        let (r, mu) = (weights(n, &radii), weights(n, &mu));
        let eps = default_eps(n);
        let d = qi(d);
        let mut coins = RngCoins::new(seed);
        let choice = if rand { Choice::Rand(&mut coins) } else { Choice::Det };
        let res = blur(&Oracles::default(), &g, &sub, &s, &r, &mu, &d, &eps, choice, SelfCheck::Off);
        verify::check_blur(&g, &sub, &s, &res.s_sup, &res.bad, &r, &d).unwrap();
        if !rand {
            let budget = verify::det_blur_budget(&d, &eps, &mu, &r, &vec![true; n]);
            verify::check_cut_budget(&mu, &res.bad, &budget).unwrap();
        }
    }

    #[test]
    fn strong_clusters_are_separated_and_small(n in 1usize..80, extra in 0usize..20, seed in any::<u64>()) {
        let g = graph(n, extra, 1, seed);
        let sc = strong_cluster(&g, &Oracles::default()).unwrap();
        let b = sc.b as i128;
        let clusters: Vec<Vec<usize>> = sc.clusters.iter().map(|c| c.nodes.clone()).collect();
        let centers: Vec<usize> = sc.clusters.iter().map(|c| c.center).collect();
        let spec = ClusterSpec { separation: Some(2), radius: Some(qi(6 * b * b)), min_covered: Some(n.div_ceil(2)), ..Default::default() };
        verify::check_clustering(&g, &clusters, Some(&centers), &spec).unwrap();
    }

    #[test]
    fn terminal_clustering_covers_good_nodes(
        n in 2usize..60, extra in 0usize..40, seed in any::<u64>(),
        bits in prop::collection::vec(prop::bool::weighted(0.3), 1..8),
        radii in prop::collection::vec(0u64..3, 1..6),
        d in 4i128..40,
    ) {
        let g = graph(n, extra, 6, seed);
        let h = Subgraph::full(&g);
        let t = mask(n, &bits);
        let src: Vec<usize> = (0..n).filter(|&v| t[v]).collect();
        let ruling = verify::sp(&g, &vec![true; n], None, &src, None).into_iter().flatten().max().unwrap();
        let r = weights(n, &radii);
        let mu = vec![1u64; n];
        let del = vec![Q::zero(); n];
        let inp = SteroidsInput { h: &h, r: &r, mu: &mu, q: &t, del: &del, ruling: qi(ruling), d: qi(d), eps: eps_log(n) };
        let tc = steroids(&Oracles::default(), &g, &inp, Choice::Det, SelfCheck::Off).unwrap();
        for v in 0..n {
            prop_assert!(tc.good[v] != tc.bad[v]);
            if tc.good[v] {
                let c = tc.cluster_of[v];
                prop_assert!(c != lddkit::graph::NONE);
                prop_assert!(tc.clusters[c as usize].nodes.contains(&v));
            }
        }
        let clusters: Vec<Vec<usize>> = tc.clusters.iter().map(|c| c.nodes.clone()).collect();
        let centers: Vec<usize> = tc.clusters.iter().map(|c| c.terminal).collect();
        verify::check_clustering(&g, &clusters, Some(&centers), &ClusterSpec::default()).unwrap();
    }

    #[test]
    fn padded_partition_respects_diameter(n in 1usize..60, extra in 0usize..40, seed in any::<u64>(), d in 1u64..20) {
        let g = graph(n, extra, 6, seed);
        let mu = vec![1u64; n];
        let pp = padded_partition(&Oracles::default(), &g, d, &mu, 2, Choice::Det, SelfCheck::Off).unwrap();
        let clusters: Vec<Vec<usize>> = pp.clustering.clusters.iter().map(|c| c.nodes.clone()).collect();
        let spec = ClusterSpec { diameter: Some(pp.diameter_bound.clone()), ..Default::default() };
        verify::check_clustering(&g, &clusters, None, &spec).unwrap();
        let padded = padded_nodes(&g, &pp.clustering.cluster_of, d);
        let flags = verify::padded_flags(&g, &pp.clustering.cluster_of, &qi(d as i128));
        prop_assert_eq!(padded, flags);
    }

    #[test]
    fn lsst_is_a_spanning_tree_with_reported_cost(n in 1usize..40, extra in 0usize..40, seed in any::<u64>(), mu in prop::collection::vec(0u64..5, 1..6)) {
        let g = graph(n, extra, 10, seed);
        let mu = weights(g.m().max(1), &mu)[..g.m()].to_vec();
        let t = lsst(&Oracles::default(), &g, &mu, Choice::Det, SelfCheck::Off).unwrap();
        let (cost, _) = verify::check_tree_stretch(&g, &t.edges, &mu).unwrap();
        prop_assert_eq!(cost, t.tree_cost);
    }

    #[test]
    fn embedding_certificates_hold(n in 1usize..24, extra in 0usize..12, seed in any::<u64>(), repetition in any::<bool>()) {
        let g = graph(n, extra, 5, seed);
        let lab = if repetition { Labeling::Repetition } else { Labeling::Raw };
        let emb = l1_embed(&Oracles::default(), &g, lab, Choice::Det, SelfCheck::Off).unwrap();
        verify::check_embedding(&g, &emb, lab).unwrap();
    }
}
