//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero if any fails.

use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::cmp::Reverse;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lddkit::blurry::{blur, default_eps as blur_eps, exact_blur};
use lddkit::clustering::padded::cover_rounds;
use lddkit::clustering::{rb_split, sparse_cover, RbInput};
use lddkit::embed::{distortion_report, l1_embed, Labeling};
use lddkit::gen::{self, Lengths};
use lddkit::graph::{Graph, Subgraph};
use lddkit::lsst::{lsst, star_decompose, Part};
use lddkit::oracles::{Delays, Mode, Oracles};
use lddkit::params::{eps_log, Choice, FixedCoins, RngCoins, SelfCheck};
use lddkit::rational::{fmt_q, pow, q, qi, qu, Q};
use lddkit::strong::strong_cluster;
use lddkit::verify::{self, ClusterSpec, SplitInstance, SplitOutput};

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat_in(r: &mut ChaCha8Rng, num_max: i64, den_max: i64) -> Q {
    q(r.gen_range(0..=num_max), r.gen_range(1..=den_max))
}

fn first_bits_agree(g: &Graph, u: usize, v: usize, i: u32) -> bool {
    let b = g.b();
    if i == 0 {
        return true;
    }
    (g.id(u) >> (b - i)) == (g.id(v) >> (b - i))
}

fn bfs_components(g: &Graph, alive: &[bool]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut k = 0;
    for s in 0..g.n() {
        if !alive[s] || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = k;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &(w, _) in g.adj(u) {
                let w = w as usize;
                if alive[w] && comp[w] == usize::MAX {
                    comp[w] = k;
                    q.push_back(w);
                }
            }
        }
        k += 1;
    }
    comp
}

// 1 and 2 share a corpus
fn strong_corpus() -> Vec<Graph> {
    (0..500u64)
        .map(|s| {
            let mut r = rng(1000 + s);
            let n = r.gen_range(2..=500);
            // long shapes make the phases delete nodes; dense ones end in one cluster
            match s % 4 {
                0 => gen::random_connected(n, r.gen_range(0..=n), Lengths::UNIT, s).unwrap(),
                1 => gen::random_tree(n, Lengths::UNIT, s).unwrap(),
                2 => gen::path(n, Lengths::UNIT, s).unwrap(),
                _ => {
                    let rows = r.gen_range(1..=3).min(n);
                    gen::grid(rows, n / rows, Lengths::UNIT, s).unwrap()
                }
            }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut covered_min = f64::MAX;
    let mut partial = 0;
    for (k, g) in strong_corpus().iter().enumerate() {
        let n = g.n();
        let o = Oracles::default();
        let sc = strong_cluster(g, &o).map_err(|e| format!("graph {}: {}", k, e))?;
        let b = sc.b as i128;
        let clusters: Vec<Vec<usize>> = sc.clusters.iter().map(|c| c.nodes.clone()).collect();
        let centers: Vec<usize> = sc.clusters.iter().map(|c| c.center).collect();
        let spec = ClusterSpec { separation: Some(2), diameter: None, radius: Some(qi(6 * b * b)), min_covered: Some((2 * n).div_ceil(3)) };
        verify::check_clustering(g, &clusters, Some(&centers), &spec).map_err(|v| format!("graph {} (n={}): {}", k, n, v))?;
        // the reported trees are BFS trees within the cluster of depth <= 6b^2
        for c in &sc.clusters {
            let mut parent: HashMap<usize, usize> = HashMap::new();
            for &(ch, p) in &c.tree_edges {
                ensure(g.find_edge(ch, p).is_some(), || format!("graph {}: tree edge ({}, {}) not in G", k, ch, p))?;
                parent.insert(ch, p);
            }
            ensure(parent.len() + 1 == c.nodes.len(), || format!("graph {}: tree of {} has wrong size", k, c.center))?;
            for &v in &c.nodes {
                let mut x = v;
                let mut depth = 0i128;
                while x != c.center {
                    x = *parent.get(&x).ok_or_else(|| format!("graph {}: node {} off the tree", k, v))?;
                    depth += 1;
                    ensure(depth <= 6 * b * b, || format!("graph {}: tree depth above 6b^2", k))?;
                }
            }
        }
        let calls = o.stats().count_calls;
        ensure(calls == sc.b as u64, || format!("graph {}: {} count calls, b = {}", k, calls, sc.b))?;
        covered_min = covered_min.min(sc.clustered_count() as f64 / n as f64);
        partial += !sc.unclustered.is_empty() as usize;
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {:.1}s", secs))?;
    Ok(format!("500 graphs ({} with unclustered nodes), min coverage {:.3}, {:.1}s", partial, covered_min, secs))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for (k, g) in strong_corpus().iter().enumerate() {
        let n = g.n() as i128;
        let sc = strong_cluster(g, &Oracles::default()).map_err(|e| e.to_string())?;
        let b = sc.b as i128;
        ensure(sc.states.len() == sc.b as usize + 1, || format!("graph {}: {} states", k, sc.states.len()))?;
        for st in &sc.states {
            let i = st.i;
            let comp = bfs_components(g, &st.alive);
            let centers: Vec<usize> = (0..g.n()).filter(|&v| st.centers[v]).collect();
            ensure(centers.iter().all(|&c| st.alive[c]), || format!("graph {} phase {}: dead center", k, i))?;
            let mut rep: HashMap<usize, usize> = HashMap::new();
            for &c in &centers {
                let r = *rep.entry(comp[c]).or_insert(c);
                ensure(first_bits_agree(g, r, c, i), || format!("graph {} phase {}: centers {} and {} disagree on the first bits", k, i, r, c))?;
            }
            let d = verify::sp(g, &st.alive, None, &centers, None);
            for v in 0..g.n() {
                if st.alive[v] {
                    ensure(d[v].is_some_and(|x| x <= 6 * i as i128 * b), || format!("graph {} phase {}: node {} at {:?} > 6ib", k, i, v, d[v]))?;
                }
            }
            let alive = st.alive.iter().filter(|&&a| a).count() as i128;
            ensure(3 * b * alive >= 3 * b * n - i as i128 * n, || format!("graph {} phase {}: |V_i| = {} too small", k, i, alive))?;
            checked += 1;
        }
    }
    Ok(format!("{} phase states", checked))
}

fn blur_instance(r: &mut ChaCha8Rng, n_max: usize, d_max: i128) -> (Graph, Vec<bool>, Vec<u64>, Vec<u64>, Q) {
    let n = r.gen_range(2..=n_max);
    let g = gen::random_connected(n, r.gen_range(0..=n), Lengths { lo: 1, hi: 10 }, r.gen()).unwrap();
    let mut s = vec![false; n];
    for _ in 0..r.gen_range(1..=3) {
        s[r.gen_range(0..n)] = true;
    }
    let radii: Vec<u64> = (0..n).map(|_| if r.gen_bool(0.3) { 0 } else { r.gen_range(0..=8) }).collect();
    let mu: Vec<u64> = (0..n).map(|_| r.gen_range(0..=10)).collect();
    let d = qi(r.gen_range(2..=d_max));
    (g, s, radii, mu, d)
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let mut tight: Option<Q> = None;
    let mut r = rng(3);
    for k in 0..500 {
        let (g, s, radii, mu, d) = blur_instance(&mut r, 200, 128);
        let eps = blur_eps(g.n());
        let sub = Subgraph::full(&g);
        let res = blur(&Oracles::default(), &g, &sub, &s, &radii, &mu, &d, &eps, Choice::Det, SelfCheck::Off);
        verify::check_blur(&g, &sub, &s, &res.s_sup, &res.bad, &radii, &d).map_err(|v| format!("instance {}: {}", k, v))?;
        let budget = verify::det_blur_budget(&d, &eps, &mu, &radii, &vec![true; g.n()]);
        let w = verify::check_cut_budget(&mu, &res.bad, &budget).map_err(|v| format!("instance {}: {}", k, v))?;
        if !budget.is_zero() {
            let ratio = w / budget;
            if tight.as_ref().is_none_or(|t| ratio > *t) {
                tight = Some(ratio);
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {:.1}s", secs))?;
    Ok(format!("500 instances, max bad/budget {}, {:.1}s", tight.map_or("0".into(), |t| format!("{:.4}", lddkit::rational::to_f64(&t))), secs))
}

fn blur_levels(d: &Q, eps: &Q) -> u32 {
    let mut d = d.clone();
    let mut l = 0;
    while d > Q::one() {
        d = (Q::one() - eps) * d / qi(2);
        l += 1;
    }
    l
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut instances = 0;
    let mut worst: Option<Q> = None;
    while instances < 40 {
        let (g, s, radii, mu, d) = blur_instance(&mut r, 24, 600);
        let eps = blur_eps(g.n());
        let levels = blur_levels(&d, &eps);
        if levels > 10 {
            continue;
        }
        let sub = Subgraph::full(&g);
        let mut bad_count = vec![0u64; g.n()];
        for mask in 0..(1u64 << levels) {
            let mut coins = FixedCoins::from_mask(mask, levels as usize);
            let res = blur(&Oracles::default(), &g, &sub, &s, &radii, &mu, &d, &eps, Choice::Rand(&mut coins), SelfCheck::Off);
            ensure(coins.used <= levels as usize, || format!("{} coins used for {} levels", coins.used, levels))?;
            verify::check_blur(&g, &sub, &s, &res.s_sup, &res.bad, &radii, &d).map_err(|v| v.to_string())?;
            for v in 0..g.n() {
                bad_count[v] += res.bad[v] as u64;
            }
        }
        let total = Q::from_integer(BigInt::from(1u64 << levels));
        for v in 0..g.n() {
            let p = qu(bad_count[v]) / &total;
            let bound = verify::rand_blur_bound(&d, &eps, radii[v]);
            ensure(p <= bound, || format!("node {}: Pr[bad] = {} > {}", v, fmt_q(&p), fmt_q(&bound)))?;
            if !bound.is_zero() {
                let ratio = &p / &bound;
                if worst.as_ref().is_none_or(|w| ratio > *w) {
                    worst = Some(ratio);
                }
            }
        }
        instances += 1;
    }
    Ok(format!("40 instances enumerated, max Pr/bound {}", worst.map_or("0".into(), |w| fmt_q(&w))))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut strings = 0u64;
    for k in 1..=40i128 {
        let d = qi(3 * k);
        let ell = (2 * k) as u64;
        // u = 0 with sole neighbor v = 1; v continues into a random tail
        let tail = r.gen_range(0..6);
        let mut edges = vec![(0, 1, ell)];
        for t in 0..tail {
            edges.push((1 + t, 2 + t, r.gen_range(0..=3)));
        }
        let g = Graph::build(2 + tail, (0..(2 + tail) as u64).collect(), None, &edges, 64).unwrap();
        let mut s = vec![false; g.n()];
        s[0] = true;
        let levels = blur_levels(&d, &Q::zero());
        for mask in 0..(1u64 << levels) {
            let out = exact_blur(&g, &s, &d, &mut FixedCoins::from_mask(mask, levels as usize));
            ensure(!out[1], || format!("D = {}: v included under coins {:b}", 3 * k, mask))?;
            strings += 1;
        }
    }
    Ok(format!("{} coin strings over D = 3..120, v never included", strings))
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(6);
    let mut rand_runs = 0;
    for k in 0..500 {
        let n = r.gen_range(2..=200usize);
        let g = gen::random_connected(n, r.gen_range(0..=n), Lengths { lo: 1, hi: 8 }, r.gen()).unwrap();
        let h = Subgraph::full(&g);
        let mut q_red = vec![false; n];
        let mut q_blue = vec![false; n];
        for _ in 0..r.gen_range(1..=(n / 4).max(1)) {
            let v = r.gen_range(0..n);
            if r.gen_bool(0.5) {
                q_red[v] = true;
                q_blue[v] = false;
            } else {
                q_blue[v] = true;
                q_red[v] = false;
            }
        }
        let del: Vec<Q> = (0..n).map(|_| rat_in(&mut r, 12, 4)).collect();
        let src: Vec<(usize, Q)> = (0..n).filter(|&v| q_red[v] || q_blue[v]).map(|v| (v, del[v].clone())).collect();
        let ruling = verify::sp_delayed(&g, &vec![true; n], None, &src).into_iter().map(|x| x.unwrap()).max().unwrap();
        let radii: Vec<u64> = (0..n).map(|_| r.gen_range(0..=4)).collect();
        let mu: Vec<u64> = (0..n).map(|_| r.gen_range(0..=5)).collect();
        let d = qi(r.gen_range(1..=24));
        let eps = eps_log(n);
        let rand = k % 5 == 4;
        let depth = if rand { Some(lddkit::rational::ceil_log2_u(lddkit::rational::floor_i128(&d).max(1) as u64)) } else { None };
        let inp = RbInput { h: &h, r: &radii, mu: &mu, q_red: &q_red, q_blue: &q_blue, del: &del, ruling, d: d.clone(), eps: eps.clone(), depth };
        let mut coins = RngCoins::new(k as u64);
        let choice = if rand { Choice::Rand(&mut coins) } else { Choice::Det };
        let out = rb_split(&Oracles::default(), &g, &inp, choice, SelfCheck::Off).map_err(|e| format!("instance {}: {}", k, e))?;
        let si = SplitInstance { h: &h, r: &radii, mu: &mu, q_red: &q_red, q_blue: &q_blue, del: &del, d: &d, eps: &eps };
        let so = SplitOutput { q_red: &out.q_red, q_blue: &out.q_blue, edges: &out.edges, bad: &out.bad, depth: out.depth };
        verify::check_split(&g, &si, &so, !rand).map_err(|v| format!("instance {} (n={}): {}", k, n, v))?;
        rand_runs += rand as usize;
    }
    Ok(format!("500 instances ({} coin-driven, properties 1-3), {:.1}s", rand_runs, t0.elapsed().as_secs_f64()))
}

fn criterion_7() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(7);
    let ds = [1u64, 4, 16, 64];
    let mut slack = usize::MAX;
    for k in 0..200 {
        let n = r.gen_range(1..=200usize);
        let g = gen::random_connected(n, r.gen_range(0..=n), Lengths { lo: 1, hi: 16 }, r.gen()).unwrap();
        let d = ds[k % 4];
        let cover = sparse_cover(&Oracles::default(), &g, d, None, Choice::Det, SelfCheck::Off).map_err(|e| format!("graph {}: {}", k, e))?;
        let t = cover.t as usize;
        ensure(t == cover_rounds(n) as usize, || format!("graph {}: t = {}", k, t))?;
        let parts: Vec<Vec<u32>> = cover.partitions.iter().map(|p| p.clustering.cluster_of.clone()).collect();
        let need = (2 * t).div_ceil(3);
        let counts = verify::check_cover(&g, &parts, d, need).map_err(|v| format!("graph {} (n={}, D={}): {}", k, n, d, v))?;
        slack = slack.min(counts.iter().min().unwrap() - need);
    }
    Ok(format!("200 graphs, min padded count - ceil(2t/3) = {}, {:.1}s", slack, t0.elapsed().as_secs_f64()))
}

/// Grow cells from the roots along shortest paths; each cell is connected.
fn voronoi(g: &Graph, roots: &[usize]) -> Vec<Part> {
    let n = g.n();
    let mut owner = vec![usize::MAX; n];
    let mut dist = vec![i128::MAX; n];
    let mut heap = BinaryHeap::new();
    for (k, &s) in roots.iter().enumerate() {
        dist[s] = 0;
        heap.push(Reverse((0i128, k, s)));
    }
    while let Some(Reverse((d, k, u))) = heap.pop() {
        if owner[u] != usize::MAX {
            continue;
        }
        owner[u] = k;
        for &(w, e) in g.adj(u) {
            let w = w as usize;
            let nd = d + g.edge(e as usize).len as i128;
            if owner[w] == usize::MAX && nd <= dist[w] {
                dist[w] = nd;
                heap.push(Reverse((nd, k, w)));
            }
        }
    }
    roots.iter().enumerate().map(|(k, &root)| Part { root, nodes: (0..n).filter(|&v| owner[v] == k).collect() }).collect()
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut parts_checked = 0;
    let mut satellites = 0;
    while parts_checked < 200 {
        let n = r.gen_range(2..=120usize);
        let g = gen::random_connected(n, r.gen_range(0..=n), Lengths { lo: 1, hi: 10 }, r.gen()).unwrap();
        let k = r.gen_range(1..=4usize).min(n);
        let mut roots: Vec<usize> = Vec::new();
        while roots.len() < k {
            let v = r.gen_range(0..n);
            if !roots.contains(&v) {
                roots.push(v);
            }
        }
        let parts = voronoi(&g, &roots);
        let mut radius = 1i128;
        for p in &parts {
            let d = verify::sp(&g, &{ let mut m = vec![false; n]; for &v in &p.nodes { m[v] = true; } m }, None, &[p.root], None);
            radius = radius.max(p.nodes.iter().map(|&v| d[v].unwrap()).max().unwrap());
        }
        let mu: Vec<u64> = (0..g.m()).map(|_| r.gen_range(1..=5)).collect();
        let sd = star_decompose(&Oracles::default(), &g, &parts, &qi(radius), &mu, &q(1, 10), Choice::Det, SelfCheck::Off).map_err(|e| e.to_string())?;
        verify::check_star(&g, &parts, &sd).map_err(|v| v.to_string())?;
        parts_checked += parts.len();
        satellites += sd.stars.iter().map(|s| s.satellites.len()).sum::<usize>();
    }
    Ok(format!("{} rooted parts, {} satellites", parts_checked, satellites))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut levels = 0;
    for k in 0..30 {
        let n = r.gen_range(2..=60usize);
        let g = gen::random_connected(n, r.gen_range(0..=n), Lengths { lo: 1, hi: 12 }, r.gen()).unwrap();
        let mu: Vec<u64> = (0..g.m()).map(|_| r.gen_range(1..=4)).collect();
        let t = lsst(&Oracles::default(), &g, &mu, Choice::Det, SelfCheck::Off).map_err(|e| format!("graph {}: {}", k, e))?;
        for l in &t.levels {
            verify::check_part_forest(&g, &l.parts, &l.forest, &pow(&(Q::one() + &t.eps), l.j)).map_err(|v| format!("graph {} level {}: {}", k, l.j, v))?;
            levels += 1;
        }
        let (cost, _) = verify::check_tree_stretch(&g, &t.edges, &mu).map_err(|v| v.to_string())?;
        ensure(cost == t.tree_cost, || format!("graph {}: reported cost {} vs {}", k, t.tree_cost, cost))?;
    }
    for k in 0..30 {
        let n = r.gen_range(1..=80usize);
        let g = gen::random_tree(n, Lengths { lo: 1, hi: 9 }, r.gen()).unwrap();
        let mu: Vec<u64> = (0..g.m()).map(|_| r.gen_range(1..=4)).collect();
        let t = lsst(&Oracles::default(), &g, &mu, Choice::Det, SelfCheck::Off).map_err(|e| format!("tree {}: {}", k, e))?;
        let (cost, _) = verify::check_tree_stretch(&g, &t.edges, &mu).map_err(|v| v.to_string())?;
        let base: u128 = g.edges().iter().zip(&mu).map(|(e, &w)| w as u128 * e.len as u128).sum();
        ensure(cost == base && t.edges.len() == g.m(), || format!("tree {}: ratio is not 1", k))?;
    }
    let mut worst = 0f64;
    for n in 3..=20usize {
        for len in [Lengths::UNIT, Lengths { lo: 1, hi: 10 }] {
            let g = gen::cycle(n, len, n as u64).unwrap();
            let mu = vec![1u64; g.m()];
            let t = lsst(&Oracles::default(), &g, &mu, Choice::Det, SelfCheck::Off).map_err(|e| e.to_string())?;
            let opt = verify::brute_force_min_tree_cost(&g, &mu).unwrap();
            let (cost, _) = verify::check_tree_stretch(&g, &t.edges, &mu).map_err(|v| v.to_string())?;
            ensure(cost <= 10 * opt, || format!("C_{}: cost {} > 10 * optimum {}", n, cost, opt))?;
            worst = worst.max(cost as f64 / opt as f64);
        }
    }
    Ok(format!("{} levels checked, 30 trees with ratio 1, cycles within {:.3}x of optimum", levels, worst))
}

fn criterion_10() -> Outcome {
    let graphs: Vec<(&str, Graph, Labeling)> = vec![
        ("grid 4x4", gen::grid(4, 4, Lengths::UNIT, 0).unwrap(), Labeling::Raw),
        ("cycle 32", gen::cycle(32, Lengths { lo: 1, hi: 5 }, 1).unwrap(), Labeling::Raw),
        ("hypercube 6", gen::hypercube(6, Lengths::UNIT, 2).unwrap(), Labeling::Raw),
        ("tree 50", gen::random_tree(50, Lengths { lo: 1, hi: 7 }, 3).unwrap(), Labeling::Raw),
        ("random 100", gen::random_connected(100, 60, Lengths { lo: 1, hi: 6 }, 4).unwrap(), Labeling::Raw),
        ("random 128", gen::random_connected(128, 128, Lengths { lo: 1, hi: 8 }, 5).unwrap(), Labeling::Raw),
        ("random 24 repetition", gen::random_connected(24, 12, Lengths { lo: 1, hi: 4 }, 6).unwrap(), Labeling::Repetition),
    ];
    let mut pairs = 0;
    let mut notes = Vec::new();
    for (name, g, lab) in graphs {
        let emb = l1_embed(&Oracles::default(), &g, lab, Choice::Det, SelfCheck::Off).map_err(|e| format!("{}: {}", name, e))?;
        let rep = verify::check_embedding(&g, &emb, lab).map_err(|v| format!("{}: {}", name, v))?;
        let dist = distortion_report(&g, &emb, usize::MAX);
        ensure(dist.exact, || format!("{}: distortion not exact", name))?;
        ensure(dist.max_expansion <= qu(emb.dims as u64), || format!("{}: expansion {} > dims {}", name, fmt_q(&dist.max_expansion), emb.dims))?;
        let c = dist.max_contraction.ok_or_else(|| format!("{}: some pair collapses", name))?;
        pairs += rep.pairs;
        notes.push(format!("{} exp/dims {:.2} contr {:.2}", name, lddkit::rational::to_f64(&dist.max_expansion) / emb.dims as f64, lddkit::rational::to_f64(&c)));
    }
    Ok(format!("{} pairs certified; {}", pairs, notes.join(", ")))
}

fn criterion_11() -> Outcome {
    let mut r = rng(11);
    let epss = [Q::zero(), q(1, 10), q(1, 3), q(1, 2), Q::one()];
    for k in 0..1000u64 {
        let n = r.gen_range(1..=40usize);
        let g = gen::random_connected(n, r.gen_range(0..=n), Lengths { lo: 0, hi: 8 }, r.gen()).unwrap();
        let node: Vec<bool> = (0..n).map(|_| r.gen_bool(0.85)).collect();
        let edge: Vec<bool> = (0..g.m()).map(|_| r.gen_bool(0.85)).collect();
        let sub = Subgraph { node: node.clone(), edge };
        let alive: Vec<usize> = (0..n).filter(|&v| node[v]).collect();
        if alive.is_empty() {
            continue;
        }
        let mut sources: Vec<usize> = (0..r.gen_range(1..=3)).map(|_| alive[r.gen_range(0..alive.len())]).collect();
        sources.sort();
        sources.dedup();
        let kind = r.gen_range(0..3);
        let ints: Vec<i128> = (0..n).map(|_| r.gen_range(0..=6)).collect();
        let rats: Vec<Q> = (0..n).map(|_| rat_in(&mut r, 20, 3)).collect();
        let (delays, del_q): (Delays, Vec<Q>) = match kind {
            0 => (Delays::Zero, vec![Q::zero(); n]),
            1 => (Delays::Int(&ints), ints.iter().map(|&x| qi(x)).collect()),
            _ => (Delays::Rat(&rats), rats.clone()),
        };
        let d = rat_in(&mut r, 90, 3);
        let eps = epss[r.gen_range(0..epss.len())].clone();
        let o = Oracles::new(Mode::Perturbed(k));
        let f = o.dist(&g, &sub, &sources, delays, &d, &eps).map_err(|e| format!("call {}: {}", k, e))?;
        verify::check_dist_forest(&g, &sub, &sources, &del_q, &d, &eps, &f).map_err(|v| format!("call {}: {}", k, v))?;
    }
    for k in 0..300u64 {
        let n = r.gen_range(1..=60usize);
        let g = gen::random_connected(n, r.gen_range(0..=n), Lengths { lo: 0, hi: 9 }, r.gen()).unwrap();
        let mut s = vec![false; n];
        for _ in 0..r.gen_range(1..=4) {
            s[r.gen_range(0..n)] = true;
        }
        let eps = epss[r.gen_range(0..epss.len())].clone();
        let phi = Oracles::default().potential(&g, &s, &eps).map_err(|e| format!("potential {}: {}", k, e))?;
        verify::check_potential(&g, &s, &eps, &phi).map_err(|v| format!("potential {}: {}", k, v))?;
    }
    Ok("1000 perturbed distance calls, 300 potentials".into())
}

fn run_cli(bin: &Path, dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(bin).current_dir(dir).env_remove("LDDKIT_SEED").args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{:?} exited with {:?}: {}", args, out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_12() -> Outcome {
    let bin = Path::new(env!("CARGO_BIN_EXE_lddkit"));
    let root = std::env::temp_dir().join(format!("lddkit-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&root);
    let cmds: Vec<Vec<&str>> = vec![
        vec!["gen", "connected", "--n", "60", "--extra", "30", "--max-len", "7", "--out", "g.txt"],
        vec!["gen", "cycle", "--n", "40", "--out", "u.txt"],
        vec!["cluster-strong", "--input", "u.txt", "--out", "cs.json"],
        vec!["blur", "--input", "g.txt", "--sources", "s.txt", "--distance", "40", "--out", "blur.json"],
        vec!["partition", "--input", "g.txt", "--distance", "4", "--out", "part.json"],
        vec!["cover", "--input", "g.txt", "--distance", "8", "--out", "cover.json"],
        vec!["cut", "--input", "g.txt", "--terminals", "s.txt", "--out", "cut.json"],
        vec!["star", "--input", "g.txt", "--out", "star.json"],
        vec!["lsst", "--input", "g.txt", "--out", "tree.json"],
        vec!["embed", "--input", "g.txt", "--out", "emb.csv"],
        vec!["bench", "--sizes", "8,16", "--out", "bench.json"],
        vec!["verify", "lsst", "--input", "g.txt", "--artifact", "tree.json"],
        vec!["verify", "embedding", "--input", "g.txt", "--artifact", "emb.json"],
    ];
    let files = ["g.txt", "u.txt", "cs.json", "blur.json", "part.json", "cover.json", "cut.json", "star.json", "tree.json", "emb.csv", "emb.json", "bench.json"];
    let modes: Vec<Vec<&str>> = vec![vec!["--mode", "det"], vec!["--mode", "rand", "--seed", "17"], vec!["--mode", "rand", "--seed", "17", "--oracle", "perturbed"]];
    let mut compared = 0;
    for (mi, mode) in modes.iter().enumerate() {
        let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
        for rep in 0..2 {
            let dir = root.join(format!("m{}r{}", mi, rep));
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            std::fs::write(dir.join("s.txt"), "0 11 23\n").map_err(|e| e.to_string())?;
            let mut got = Vec::new();
            for c in &cmds {
                let mut args: Vec<&str> = mode.clone();
                args.extend(c.iter().copied());
                got.push(run_cli(bin, &dir, &args)?);
            }
            for f in files {
                got.push(std::fs::read(dir.join(f)).map_err(|e| format!("{}: {}", f, e))?);
            }
            outputs.push(got);
        }
        for (k, (a, b)) in outputs[0].iter().zip(&outputs[1]).enumerate() {
            ensure(a == b, || format!("mode {:?}: output {} differs between runs", mode, k))?;
            compared += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&root);
    Ok(format!("{} outputs byte-identical across repeated runs (det, rand, rand+perturbed)", compared))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("strong clustering: 2-separated, coverage, radius 6b^2, b count calls", criterion_1),
        ("strong clustering phase invariants", criterion_2),
        ("deterministic blur budget", criterion_3),
        ("randomized blur bound by coin enumeration", criterion_4),
        ("exact blur excludes the far neighbor", criterion_5),
        ("red-blue split properties", criterion_6),
        ("sparse cover padding count", criterion_7),
        ("star decomposition conditions", criterion_8),
        ("low-stretch tree recursion", criterion_9),
        ("l1 embedding certificates", criterion_10),
        ("oracle contracts", criterion_11),
        ("CLI determinism", criterion_12),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k as u32 + 1;
        if filter.is_some_and(|x| x != id) {
            continue;
        }
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {:>2} {} [{}] ({:.1}s)", id, name, detail, secs),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {} [{}] ({:.1}s)", id, name, why, secs)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
