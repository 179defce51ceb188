//! Command-line front end. Every subcommand writes a JSON report with a fixed
//! envelope (schema_version, version, command, config, seed, oracle_stats).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::blurry::{blur, default_eps as blur_eps};
use crate::clustering::padded::{cover_rounds, DEFAULT_PADDING_C};
use crate::clustering::edgecut::EdgeCutInput;
use crate::clustering::{edge_cutting, padded_partition, sparse_cover, ClusterError};
use crate::embed::{distortion_report, l1_embed, Coord, EmbedError, Embedding, Labeling, Scale, ScalePartition};
use crate::gen::{self, Lengths};
use crate::graph::{dist_from, load_graph, Graph, Subgraph};
use crate::lsst::{self, LsstError, Part, Satellite, Star, StarDecomposition};
use crate::oracles::{Mode, Oracles};
use crate::params::{Choice, RngCoins, SelfCheck};
use crate::rational::{fmt_q, parse_q, pow, qi, qu, Q};
use crate::strong::{strong_cluster, StrongError};
use crate::verify;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Violation(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {}", m),
            CliError::Io(m) => write!(f, "i/o error: {}", m),
            CliError::Violation(m) => write!(f, "violation: {}", m),
        }
    }
}

impl From<verify::Violation> for CliError {
    fn from(v: verify::Violation) -> Self {
        CliError::Violation(v.to_string())
    }
}

impl From<StrongError> for CliError {
    fn from(e: StrongError) -> Self {
        match e {
            StrongError::Invariant { .. } => CliError::Violation(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::Invariant { .. } => CliError::Violation(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LsstError> for CliError {
    fn from(e: LsstError) -> Self {
        match e {
            LsstError::Invariant(_) | LsstError::Cluster(ClusterError::Invariant { .. }) => CliError::Violation(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::Code(_) | EmbedError::Cluster(ClusterError::Invariant { .. }) => CliError::Violation(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "lddkit", version, about = "Low-diameter decompositions, low-stretch trees and l1 embeddings with exact checkers")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// det makes no random choices; rand draws coins from --seed
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Det)]
    pub mode: ModeArg,
    /// falls back to LDDKIT_SEED, then 0
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = CheckArg::Fast)]
    pub selfcheck: CheckArg,
    /// perturbed returns contract-satisfying but non-shortest forests
    #[arg(long, global = true, value_enum, default_value_t = OracleArg::Exact)]
    pub oracle: OracleArg,
    /// accepted for compatibility; runs are single-threaded
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Det,
    Rand,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckArg {
    Off,
    Fast,
    Full,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleArg {
    Exact,
    Perturbed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyKind {
    Clustering,
    Blur,
    Star,
    Lsst,
    Cover,
    Embedding,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path,
    Cycle,
    Grid,
    Hypercube,
    Er,
    Tree,
    Connected,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelArg {
    Raw,
    Repetition,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Strong-diameter clustering of an unweighted graph
    ClusterStrong {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Blurry ball growing from a source set
    Blur {
        #[arg(long)]
        input: PathBuf,
        /// node indices
        #[arg(long)]
        sources: PathBuf,
        /// rational, e.g. 12 or 25/2
        #[arg(long)]
        distance: String,
        /// one radius per node (default 1)
        #[arg(long)]
        radii: Option<PathBuf>,
        /// one weight per node (default 1)
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Padded partition at scale D
    Partition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        distance: u64,
        /// one weight per node (default 1)
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PADDING_C)]
        c: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparse cover at scale D
    Cover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        distance: u64,
        #[arg(long)]
        rounds: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge-cutting clustering around terminals
    Cut {
        #[arg(long)]
        input: PathBuf,
        /// node indices
        #[arg(long)]
        terminals: PathBuf,
        /// one rational delay per node (default 0)
        #[arg(long)]
        delays: Option<PathBuf>,
        /// ruling radius; default is the exact max delayed distance
        #[arg(long)]
        ruling: Option<String>,
        #[arg(long, default_value = "1/2")]
        eps: String,
        /// one weight per edge (default 1)
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star decomposition of rooted parts
    Star {
        #[arg(long)]
        input: PathBuf,
        /// JSON list of {root, nodes}; default is the whole graph rooted at 0
        #[arg(long)]
        parts: Option<PathBuf>,
        /// default is the largest root eccentricity
        #[arg(long)]
        radius: Option<String>,
        #[arg(long, default_value = "1/10")]
        eps: String,
        /// one weight per edge (default 1)
        #[arg(long)]
        importance: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Low-stretch spanning tree
    Lsst {
        #[arg(long)]
        input: PathBuf,
        /// one weight per edge (default 1)
        #[arg(long)]
        importance: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// l1 embedding; writes a CSV and a JSON sidecar
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = LabelArg::Raw)]
        labeling: LabelArg,
        #[arg(long)]
        out: PathBuf,
        /// default: the CSV path with a .json extension
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Recheck an artifact against its graph
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        artifact: PathBuf,
        /// embedding CSV; default is the path recorded in the sidecar
        #[arg(long)]
        coords: Option<PathBuf>,
    },
    /// Generate a graph in the text format
    Gen {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// edge probability for er
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// extra random edges for connected
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long, default_value_t = 1)]
        min_len: u64,
        #[arg(long, default_value_t = 1)]
        max_len: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the producers on generated graphs and summarize
    Bench {
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Family::Cycle, Family::Grid, Family::Hypercube, Family::Er])]
        families: Vec<Family>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![16usize, 64])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        min_len: u64,
        #[arg(long, default_value_t = 1)]
        max_len: u64,
        /// write every generated graph here for replay
        #[arg(long)]
        graphs_dir: Option<PathBuf>,
        /// include wall-clock times, which makes the report non-reproducible
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Resolved run settings.
pub struct Run {
    pub seed: u64,
    pub rand: bool,
    pub check: SelfCheck,
    pub oracles: Oracles,
    common: Common,
}

impl Run {
    pub fn new(common: &Common) -> Run {
        let seed = common.seed.or_else(|| std::env::var("LDDKIT_SEED").ok().and_then(|s| s.trim().parse().ok())).unwrap_or(0);
        let check = match common.selfcheck {
            CheckArg::Off => SelfCheck::Off,
            CheckArg::Fast => SelfCheck::Fast,
            CheckArg::Full => SelfCheck::Full,
        };
        let mode = match common.oracle {
            OracleArg::Exact => Mode::Exact,
            OracleArg::Perturbed => Mode::Perturbed(seed),
        };
        Run { seed, rand: common.mode == ModeArg::Rand, check, oracles: Oracles::new(mode), common: common.clone() }
    }

    fn choice<'a>(&self, coins: &'a mut RngCoins) -> Choice<'a> {
        if self.rand {
            Choice::Rand(coins)
        } else {
            Choice::Det
        }
    }

    fn config(&self, extra: Value) -> Value {
        let mut m = Map::new();
        m.insert("mode".into(), json!(if self.rand { "rand" } else { "det" }));
        m.insert("selfcheck".into(), json!(format!("{:?}", self.common.selfcheck).to_lowercase()));
        m.insert("oracle".into(), json!(format!("{:?}", self.common.oracle).to_lowercase()));
        if let Value::Object(x) = extra {
            m.extend(x);
        }
        Value::Object(m)
    }

    fn report(&self, command: &str, config: Value, result: Value) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(command));
        m.insert("config".into(), self.config(config));
        m.insert("seed".into(), json!(self.seed));
        m.insert("oracle_stats".into(), self.oracles.stats().to_json());
        if let Value::Object(x) = result {
            m.extend(x);
        }
        Value::Object(m)
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e);
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Res<()> {
    let run = Run::new(&cli.common);
    match cli.cmd {
        Cmd::ClusterStrong { input, out } => {
            let g = read_graph(&input)?;
            let rep = cmd_cluster_strong(&run, &g)?;
            finish(&run, out.as_deref(), &rep, || verify_clustering(&g, &rep))
        }
        Cmd::Blur { input, sources, distance, radii, weights, eps, out } => {
            let g = read_graph(&input)?;
            let s = read_indices(&sources, g.n())?;
            let r = read_per(&radii, g.n(), 1)?;
            let w = read_per(&weights, g.n(), 1)?;
            let d = parse_rat(&distance, "--distance")?;
            let eps = eps.map(|e| parse_rat(&e, "--eps")).transpose()?.unwrap_or_else(|| blur_eps(g.n()));
            let rep = cmd_blur(&run, &g, &s, &r, &w, &d, &eps)?;
            finish(&run, out.as_deref(), &rep, || verify_blur(&g, &rep))
        }
        Cmd::Partition { input, distance, weights, c, out } => {
            let g = read_graph(&input)?;
            let w = read_per(&weights, g.n(), 1)?;
            let rep = cmd_partition(&run, &g, distance, &w, c)?;
            finish(&run, out.as_deref(), &rep, || verify_clustering(&g, &rep))
        }
        Cmd::Cover { input, distance, rounds, out } => {
            let g = read_graph(&input)?;
            let rep = cmd_cover(&run, &g, distance, rounds)?;
            finish(&run, out.as_deref(), &rep, || verify_cover(&g, &rep))
        }
        Cmd::Cut { input, terminals, delays, ruling, eps, weights, out } => {
            let g = read_graph(&input)?;
            let t = read_indices(&terminals, g.n())?;
            let del = match delays {
                Some(p) => read_rats(&p, g.n())?,
                None => vec![Q::zero(); g.n()],
            };
            let w = read_per(&weights, g.m(), 1)?;
            let ruling = ruling.map(|r| parse_rat(&r, "--ruling")).transpose()?;
            let eps = parse_rat(&eps, "--eps")?;
            let rep = cmd_cut(&run, &g, &t, &del, ruling, &eps, &w)?;
            finish(&run, out.as_deref(), &rep, || verify_clustering(&g, &rep))
        }
        Cmd::Star { input, parts, radius, eps, importance, out } => {
            let g = read_graph(&input)?;
            let parts = match parts {
                Some(p) => parts_from_json(&read_json(&p)?, g.n())?,
                None => vec![Part { root: 0, nodes: (0..g.n()).collect() }],
            };
            let radius = radius.map(|r| parse_rat(&r, "--radius")).transpose()?;
            let eps = parse_rat(&eps, "--eps")?;
            let w = read_per(&importance, g.m(), 1)?;
            let rep = cmd_star(&run, &g, &parts, radius, &eps, &w)?;
            finish(&run, out.as_deref(), &rep, || verify_star(&g, &rep))
        }
        Cmd::Lsst { input, importance, out } => {
            let g = read_graph(&input)?;
            let w = read_per(&importance, g.m(), 1)?;
            let rep = cmd_lsst(&run, &g, &w)?;
            finish(&run, out.as_deref(), &rep, || verify_lsst(&g, &rep))
        }
        Cmd::Embed { input, labeling, out, sidecar } => {
            let g = read_graph(&input)?;
            let sidecar = sidecar.unwrap_or_else(|| out.with_extension("json"));
            let (csv, rep, x) = cmd_embed(&run, &g, labeling, &out)?;
            write_text(Some(&out), &csv)?;
            let check = || {
                if run.check == SelfCheck::Full || g.n() <= 128 {
                    verify_embedding(&g, &rep, &x)
                } else {
                    Ok(Value::Null)
                }
            };
            finish(&run, Some(&sidecar), &rep, check)
        }
        Cmd::Verify { kind, input, artifact, coords } => {
            let g = read_graph(&input)?;
            let a = read_json(&artifact)?;
            let summary = match kind {
                VerifyKind::Clustering => verify_clustering(&g, &a)?,
                VerifyKind::Blur => verify_blur(&g, &a)?,
                VerifyKind::Star => verify_star(&g, &a)?,
                VerifyKind::Lsst => verify_lsst(&g, &a)?,
                VerifyKind::Cover => verify_cover(&g, &a)?,
                VerifyKind::Embedding => {
                    let path = match coords {
                        Some(p) => p,
                        None => {
                            let rel = a["coordinates"].as_str().ok_or_else(|| CliError::Usage("sidecar lacks a coordinates path".into()))?;
                            artifact.parent().unwrap_or(Path::new(".")).join(rel)
                        }
                    };
                    let x = read_coords(&g, &path)?;
                    verify_embedding(&g, &a, &x)?
                }
            };
            println!("{}", serde_json::to_string(&json!({"schema_version": SCHEMA_VERSION, "verdict": "pass", "kind": format!("{:?}", kind).to_lowercase(), "summary": summary})).unwrap());
            Ok(())
        }
        Cmd::Gen { family, n, p, extra, min_len, max_len, out } => {
            let g = generate(family, n, p, extra, Lengths { lo: min_len, hi: max_len.max(min_len) }, run.seed)?;
            write_text(out.as_deref(), &g.to_text())
        }
        Cmd::Bench { families, sizes, min_len, max_len, graphs_dir, timing, out } => {
            let rep = cmd_bench(&run, &families, &sizes, Lengths { lo: min_len, hi: max_len.max(min_len) }, graphs_dir.as_deref(), timing)?;
            write_json(out.as_deref(), &rep)
        }
    }
}

/// Write the report, then run the checker on what was written.
fn finish(run: &Run, out: Option<&Path>, rep: &Value, check: impl FnOnce() -> Res<Value>) -> Res<()> {
    write_json(out, rep)?;
    if run.check != SelfCheck::Off {
        check()?;
    }
    Ok(())
}

fn read_graph(p: &Path) -> Res<Graph> {
    load_graph(p).map_err(|e| match e {
        crate::graph::GraphError::Io(m) => CliError::Io(format!("{}: {}", p.display(), m)),
        other => CliError::Usage(format!("{}: {}", p.display(), other)),
    })
}

fn read_text(p: &Path) -> Res<String> {
    fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {}", p.display(), e)))
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
        .filter(|t| !t.is_empty())
}

fn read_indices(p: &Path, n: usize) -> Res<Vec<bool>> {
    let text = read_text(p)?;
    let mut m = vec![false; n];
    for t in tokens(&text) {
        let v: usize = t.parse().map_err(|_| CliError::Usage(format!("{}: bad node index {:?}", p.display(), t)))?;
        if v >= n {
            return Err(CliError::Usage(format!("{}: node {} out of range", p.display(), v)));
        }
        m[v] = true;
    }
    Ok(m)
}

fn read_per(p: &Option<PathBuf>, len: usize, default: u64) -> Res<Vec<u64>> {
    let Some(p) = p else { return Ok(vec![default; len]) };
    let text = read_text(p)?;
    let v: Vec<u64> = tokens(&text)
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("{}: bad value {:?}", p.display(), t))))
        .collect::<Res<_>>()?;
    if v.len() != len {
        return Err(CliError::Usage(format!("{}: expected {} values, found {}", p.display(), len, v.len())));
    }
    Ok(v)
}

fn read_rats(p: &Path, len: usize) -> Res<Vec<Q>> {
    let text = read_text(p)?;
    let v: Vec<Q> = tokens(&text).map(|t| parse_rat(t, &p.display().to_string())).collect::<Res<_>>()?;
    if v.len() != len {
        return Err(CliError::Usage(format!("{}: expected {} values, found {}", p.display(), len, v.len())));
    }
    Ok(v)
}

fn read_json(p: &Path) -> Res<Value> {
    serde_json::from_str(&read_text(p)?).map_err(|e| CliError::Usage(format!("{}: {}", p.display(), e)))
}

fn parse_rat(s: &str, what: &str) -> Res<Q> {
    parse_q(s).filter(|x| *x >= Q::zero()).ok_or_else(|| CliError::Usage(format!("{}: expected a non-negative rational, got {:?}", what, s)))
}

fn write_text(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn write_json(out: Option<&Path>, v: &Value) -> Res<()> {
    write_text(out, &(serde_json::to_string_pretty(v).unwrap() + "\n"))
}

fn qs(x: &Q) -> Value {
    json!(fmt_q(x))
}

fn cert(name: &str, lhs: &Q, rhs: &Q) -> Value {
    json!({"name": name, "lhs": fmt_q(lhs), "rhs": fmt_q(rhs), "holds": lhs <= rhs})
}

fn true_nodes(m: &[bool]) -> Vec<usize> {
    (0..m.len()).filter(|&v| m[v]).collect()
}

// artifact accessors

fn field<'a>(a: &'a Value, key: &str) -> Res<&'a Value> {
    a.get(key).ok_or_else(|| CliError::Usage(format!("artifact lacks {:?}", key)))
}

fn as_usize(v: &Value, what: &str) -> Res<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| CliError::Usage(format!("{}: expected an index", what)))
}

fn usizes(v: &Value, what: &str) -> Res<Vec<usize>> {
    v.as_array().ok_or_else(|| CliError::Usage(format!("{}: expected a list", what)))?.iter().map(|x| as_usize(x, what)).collect()
}

fn u64s(v: &Value, what: &str) -> Res<Vec<u64>> {
    v.as_array()
        .ok_or_else(|| CliError::Usage(format!("{}: expected a list", what)))?
        .iter()
        .map(|x| x.as_u64().ok_or_else(|| CliError::Usage(format!("{}: expected an integer", what))))
        .collect()
}

fn rat(v: &Value, what: &str) -> Res<Q> {
    match v {
        Value::String(s) => parse_q(s).ok_or_else(|| CliError::Usage(format!("{}: bad rational {:?}", what, s))),
        Value::Number(n) => n.as_i64().map(|x| qi(x as i128)).ok_or_else(|| CliError::Usage(format!("{}: bad number", what))),
        _ => Err(CliError::Usage(format!("{}: expected a rational", what))),
    }
}

fn mask_from(n: usize, nodes: &[usize], what: &str) -> Res<Vec<bool>> {
    let mut m = vec![false; n];
    for &v in nodes {
        if v >= n {
            return Err(CliError::Usage(format!("{}: node {} out of range", what, v)));
        }
        m[v] = true;
    }
    Ok(m)
}

fn parts_json(parts: &[Part]) -> Value {
    json!(parts.iter().map(|p| json!({"root": p.root, "nodes": p.nodes})).collect::<Vec<_>>())
}

fn parts_from_json(v: &Value, n: usize) -> Res<Vec<Part>> {
    let arr = v.as_array().ok_or_else(|| CliError::Usage("parts: expected a list".into()))?;
    let mut out = Vec::new();
    for p in arr {
        let root = as_usize(field(p, "root")?, "root")?;
        let nodes = usizes(field(p, "nodes")?, "nodes")?;
        if root >= n || nodes.iter().any(|&v| v >= n) {
            return Err(CliError::Usage("parts: node out of range".into()));
        }
        out.push(Part { root, nodes });
    }
    Ok(out)
}

// producers

pub fn cmd_cluster_strong(run: &Run, g: &Graph) -> Res<Value> {
    let sc = strong_cluster(g, &run.oracles)?;
    let n = g.n();
    let b = sc.b as i128;
    let clusters: Vec<Value> = sc
        .clusters
        .iter()
        .map(|c| json!({"center": c.center, "nodes": c.nodes, "tree_edges": c.tree_edges.iter().map(|&(a, p)| [a, p]).collect::<Vec<_>>()}))
        .collect();
    let covered: usize = sc.clusters.iter().map(|c| c.nodes.len()).sum();
    let count_calls = run.oracles.stats().count_calls;
    let result = json!({
        "clusters": clusters,
        "unclustered": sc.unclustered,
        "b": sc.b,
        "guarantees": {"separation": 2, "radius": (6 * b * b).to_string(), "min_covered": (2 * n).div_ceil(3)},
        "certificates": [
            cert("covered >= ceil(2n/3)", &qu((2 * n).div_ceil(3) as u64), &qu(covered as u64)),
            cert("count calls <= b", &qu(count_calls), &qi(b)),
        ],
    });
    Ok(run.report("cluster-strong", json!({}), result))
}

pub fn cmd_blur(run: &Run, g: &Graph, s: &[bool], r: &[u64], w: &[u64], d: &Q, eps: &Q) -> Res<Value> {
    let mut coins = RngCoins::new(run.seed);
    let sub = Subgraph::full(g);
    let res = blur(&run.oracles, g, &sub, s, r, w, d, eps, run.choice(&mut coins), run.check);
    let bad_w: u128 = (0..g.n()).filter(|&v| res.bad[v]).map(|v| w[v] as u128).sum();
    let budget = verify::det_blur_budget(d, eps, w, r, &vec![true; g.n()]);
    let mut certs = Vec::new();
    if !run.rand {
        certs.push(cert("bad weight <= deterministic budget", &Q::from_integer(bad_w.into()), &budget));
    }
    let result = json!({
        "sources": true_nodes(s),
        "radii": r,
        "weights": w,
        "distance": qs(d),
        "eps": qs(eps),
        "s_sup": true_nodes(&res.s_sup),
        "bad": true_nodes(&res.bad),
        "bad_weight": bad_w.to_string(),
        "levels": res.trace.iter().map(|l| json!({"d": qs(&l.d), "branch": l.branch, "dist_calls": l.dist_calls})).collect::<Vec<_>>(),
        "certificates": certs,
    });
    Ok(run.report("blur", json!({"distance": qs(d), "eps": qs(eps)}), result))
}

pub fn cmd_partition(run: &Run, g: &Graph, d: u64, w: &[u64], c: u64) -> Res<Value> {
    let mut coins = RngCoins::new(run.seed);
    let pp = padded_partition(&run.oracles, g, d, w, c, run.choice(&mut coins), run.check)?;
    let tc = &pp.clustering;
    let clusters: Vec<Value> = tc.clusters.iter().map(|c| json!({"center": c.terminal, "nodes": c.nodes, "radius": qs(&c.radius)})).collect();
    let padded = verify::padded_flags(g, &tc.cluster_of, &qu(d));
    let unpadded_w: u128 = (0..g.n()).filter(|&v| !padded[v]).map(|v| w[v] as u128).sum();
    let total = Q::from_integer(pp.total_weight.into());
    let result = json!({
        "d": d,
        "c": pp.c,
        "d_steroids": qs(&pp.d_steroids),
        "eps": qs(&pp.eps),
        "clusters": clusters,
        "cluster_of": tc.cluster_of,
        "bad": true_nodes(&tc.bad),
        "weights": w,
        "guarantees": {"diameter": qs(&pp.diameter_bound), "padding": d, "max_unpadded_weight": qs(&(&total / qi(10)))},
        "certificates": [
            cert("bad weight <= total / 10", &Q::from_integer(pp.bad_weight.into()), &(&total / qi(10))),
            cert("unpadded weight <= total / 10", &Q::from_integer(unpadded_w.into()), &(&total / qi(10))),
        ],
    });
    Ok(run.report("partition", json!({"distance": d, "c": c}), result))
}

pub fn cmd_cover(run: &Run, g: &Graph, d: u64, rounds: Option<u32>) -> Res<Value> {
    let mut coins = RngCoins::new(run.seed);
    let cover = sparse_cover(&run.oracles, g, d, rounds, run.choice(&mut coins), run.check)?;
    let t = cover.t as usize;
    let counts: Vec<usize> = (0..g.n()).map(|v| cover.padded_count(v)).collect();
    let min_count = counts.iter().copied().min().unwrap_or(t);
    let result = json!({
        "d": d,
        "t": cover.t,
        "t_min": cover_rounds(g.n()),
        "partitions": cover.partitions.iter().map(|p| json!(p.clustering.cluster_of)).collect::<Vec<_>>(),
        "diameter_bounds": cover.partitions.iter().map(|p| qs(&p.diameter_bound)).collect::<Vec<_>>(),
        "padded_count": counts,
        "certificates": [cert("ceil(2t/3) <= min padded count", &qu((2 * t).div_ceil(3) as u64), &qu(min_count as u64))],
    });
    Ok(run.report("cover", json!({"distance": d, "rounds": rounds}), result))
}

pub fn cmd_cut(run: &Run, g: &Graph, t: &[bool], del: &[Q], ruling: Option<Q>, eps: &Q, w: &[u64]) -> Res<Value> {
    let n = g.n();
    if !t.iter().any(|&x| x) {
        return Err(CliError::Usage("terminal set is empty".into()));
    }
    let live = vec![true; n];
    let src: Vec<(usize, Q)> = (0..n).filter(|&v| t[v]).map(|v| (v, del[v].clone())).collect();
    let exact = verify::sp_delayed(g, &live, None, &src);
    let reach = exact.iter().flatten().max().cloned().unwrap_or_else(Q::zero);
    if exact.iter().any(|x| x.is_none()) {
        return Err(CliError::Usage("some node is unreachable from the terminals".into()));
    }
    let ruling = ruling.unwrap_or(reach);
    let h = Subgraph::full(g);
    let inp = EdgeCutInput { h: &h, mu: w, q: t, del, ruling: ruling.clone(), eps: eps.clone() };
    let mut coins = RngCoins::new(run.seed);
    let ec = edge_cutting(&run.oracles, g, &inp, run.choice(&mut coins), run.check)?;
    let clusters: Vec<Value> = ec.clusters.iter().map(|c| json!({"center": c.terminal, "nodes": c.nodes})).collect();
    let cut_w: u128 = ec.cut.iter().map(|&e| w[e] as u128).sum();
    let mut certs = vec![cert("slack <= eps R", &ec.slack, &(eps * &ruling))];
    if let (Some(b), false) = (&ec.cut_bound, run.rand) {
        certs.push(cert("cut weight <= bound", &Q::from_integer(cut_w.into()), b));
    }
    let result = json!({
        "clusters": clusters,
        "cut": ec.cut,
        "cut_weight": cut_w.to_string(),
        "ruling": qs(&ruling),
        "eps_inner": qs(&ec.eps_inner),
        "d_inner": qs(&ec.d_inner),
        "delays": del.iter().map(qs).collect::<Vec<_>>(),
        "guarantees": {"delayed_radius": qs(&((Q::one() + eps) * &ruling))},
        "certificates": certs,
    });
    Ok(run.report("cut", json!({"eps": qs(eps), "ruling": qs(&ruling)}), result))
}

fn star_json(sd: &StarDecomposition) -> Value {
    json!(sd
        .stars
        .iter()
        .map(|s| json!({
            "root": s.root,
            "center": s.center,
            "satellites": s.satellites.iter().map(|t| json!({"root": t.root, "nodes": t.nodes, "anchor": t.anchor, "bridge": t.bridge})).collect::<Vec<_>>(),
        }))
        .collect::<Vec<_>>())
}

pub fn cmd_star(run: &Run, g: &Graph, parts: &[Part], radius: Option<Q>, eps: &Q, w: &[u64]) -> Res<Value> {
    let radius = match radius {
        Some(r) => r,
        None => {
            let mut best = 0i128;
            for p in parts {
                let inside = mask_from(g.n(), &p.nodes, "parts")?;
                let d = verify::sp(g, &inside, None, &[p.root], None);
                for &v in &p.nodes {
                    best = best.max(d[v].ok_or_else(|| CliError::Usage(format!("part rooted at {} is disconnected", p.root)))?);
                }
            }
            qi(best)
        }
    };
    let mut coins = RngCoins::new(run.seed);
    let sd = lsst::star_decompose(&run.oracles, g, parts, &radius, w, eps, run.choice(&mut coins), run.check)?;
    let result = json!({
        "parts": parts_json(parts),
        "radius": qs(&radius),
        "eps": qs(eps),
        "stars": star_json(&sd),
        "cut_weight": sd.cut_weight.to_string(),
    });
    Ok(run.report("star", json!({"radius": qs(&radius), "eps": qs(eps)}), result))
}

pub fn cmd_lsst(run: &Run, g: &Graph, w: &[u64]) -> Res<Value> {
    let mut coins = RngCoins::new(run.seed);
    let t = lsst::lsst(&run.oracles, g, w, run.choice(&mut coins), run.check)?;
    let dt = lsst::tree_edge_distances(g, &t.edges, t.root).ok_or_else(|| CliError::Violation("tree does not span".into()))?;
    let stretch: Vec<Value> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| json!({"edge": k, "u": e.u, "v": e.v, "len": e.len, "tree_distance": dt[k].to_string(), "stretch": if e.len == 0 { Value::Null } else { qs(&Q::new(dt[k].into(), (e.len as i128).into())) }}))
        .collect();
    let result = json!({
        "edges": t.edges,
        "root": t.root,
        "importance": w,
        "levels": t.levels.iter().map(|l| json!({"j": l.j, "parts": parts_json(&l.parts), "forest": l.forest})).collect::<Vec<_>>(),
        "eps": qs(&t.eps),
        "top_level": t.j,
        "diameter": t.diameter.to_string(),
        "stretch_report": {
            "tree_cost": t.tree_cost.to_string(),
            "graph_cost": t.graph_cost.to_string(),
            "ratio": t.ratio().as_ref().map(qs),
            "edges": stretch,
        },
    });
    Ok(run.report("lsst", json!({}), result))
}

pub fn cmd_embed(run: &Run, g: &Graph, labeling: LabelArg, csv_path: &Path) -> Res<(String, Value, Vec<Vec<u64>>)> {
    let lab = match labeling {
        LabelArg::Raw => Labeling::Raw,
        LabelArg::Repetition => Labeling::Repetition,
    };
    let mut coins = RngCoins::new(run.seed);
    let emb = l1_embed(&run.oracles, g, lab, run.choice(&mut coins), run.check)?;
    let mut csv = String::new();
    csv.push_str("id");
    for c in 0..emb.dims {
        csv.push_str(&format!(",x{}", c));
    }
    csv.push('\n');
    for v in 0..g.n() {
        csv.push_str(&g.id(v).to_string());
        for c in 0..emb.dims {
            csv.push(',');
            csv.push_str(&emb.x[v][c].to_string());
        }
        csv.push('\n');
    }
    let dist = distortion_report(g, &emb, 256);
    let result = json!({
        "coordinates": csv_path.file_name().map(|f| f.to_string_lossy().to_string()),
        "dims": emb.dims,
        "t": emb.t,
        "labeling": format!("{:?}", labeling).to_lowercase(),
        "code": {"name": emb.code_name, "len": emb.code_len, "distance": emb.code_distance},
        "scales": emb.scales.iter().map(|s| json!({
            "i": s.i, "d": qs(&s.d), "diameter_bound": qs(&s.diameter_bound),
            "partitions": s.partitions.iter().map(|p| json!(p.cluster_of)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "provenance": emb.provenance.iter().map(|c| [c.scale as u64, c.partition as u64, c.bit as u64]).collect::<Vec<_>>(),
        "distortion": {
            "pairs": dist.pairs,
            "exact": dist.exact,
            "max_expansion": qs(&dist.max_expansion),
            "expansion_witness": dist.expansion_witness,
            "max_contraction": dist.max_contraction.as_ref().map(qs),
            "contraction_witness": dist.contraction_witness,
        },
        "certificates": [cert("max expansion <= dims", &dist.max_expansion, &qu(emb.dims as u64))],
    });
    let x = emb.x.clone();
    Ok((csv, run.report("embed", json!({"labeling": format!("{:?}", labeling).to_lowercase()}), result), x))
}

fn generate(f: Family, n: usize, p: f64, extra: usize, len: Lengths, seed: u64) -> Res<Graph> {
    let r = match f {
        Family::Path => gen::path(n, len, seed),
        Family::Cycle => gen::cycle(n, len, seed),
        Family::Grid => {
            let side = (n as f64).sqrt().ceil().max(1.0) as usize;
            gen::grid(side, n.div_ceil(side), len, seed)
        }
        Family::Hypercube => gen::hypercube((n.max(1) as f64).log2().ceil() as u32, len, seed),
        Family::Er => gen::erdos_renyi(n, p, len, seed),
        Family::Tree => gen::random_tree(n, len, seed),
        Family::Connected => gen::random_connected(n, extra, len, seed),
    };
    r.map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_bench(run: &Run, families: &[Family], sizes: &[usize], len: Lengths, dir: Option<&Path>, timing: bool) -> Res<Value> {
    let mut rows = Vec::new();
    for &f in families {
        for &n in sizes {
            let p = if n > 1 { (4.0 / n as f64).min(1.0) } else { 0.0 };
            let g = generate(f, n, p, n / 4, len, run.seed)?;
            let name = format!("{}-{}", format!("{:?}", f).to_lowercase(), n);
            if let Some(d) = dir {
                fs::create_dir_all(d).map_err(|e| CliError::Io(e.to_string()))?;
                write_text(Some(&d.join(format!("{}.txt", name))), &g.to_text())?;
            }
            let connected = g.n() > 0 && dist_from(&g, None, 0, None).iter().all(|x| x.is_some());
            let mut ops = Map::new();
            let time = |key: &str, ops: &mut Map<String, Value>, f: &mut dyn FnMut() -> Res<Value>| {
                let t0 = Instant::now();
                let mut v = match f() {
                    Ok(v) => v,
                    Err(e) => json!({"error": e.to_string()}),
                };
                if timing {
                    v["ms"] = json!(t0.elapsed().as_millis() as u64);
                }
                ops.insert(key.into(), v);
            };
            if g.is_unit() {
                time("cluster_strong", &mut ops, &mut || {
                    let r = Run::new(&run.common);
                    let rep = cmd_cluster_strong(&r, &g)?;
                    Ok(json!({"clusters": rep["clusters"].as_array().map_or(0, |a| a.len()), "unclustered": rep["unclustered"].as_array().map_or(0, |a| a.len()), "count_calls": rep["oracle_stats"]["count_calls"]}))
                });
            }
            time("cover_d4", &mut ops, &mut || {
                let r = Run::new(&run.common);
                let rep = cmd_cover(&r, &g, 4, None)?;
                Ok(json!({"t": rep["t"], "min_padded": rep["padded_count"].as_array().and_then(|a| a.iter().filter_map(|x| x.as_u64()).min())}))
            });
            if connected {
                time("lsst", &mut ops, &mut || {
                    let r = Run::new(&run.common);
                    let rep = cmd_lsst(&r, &g, &vec![1; g.m()])?;
                    Ok(json!({"ratio": rep["stretch_report"]["ratio"], "dist_calls": rep["oracle_stats"]["dist_calls"]}))
                });
            } else {
                ops.insert("lsst".into(), json!({"skipped": "disconnected"}));
            }
            rows.push(json!({"graph": name, "n": g.n(), "m": g.m(), "connected": connected, "ops": ops}));
        }
    }
    Ok(run.report("bench", json!({"families": families.iter().map(|f| format!("{:?}", f).to_lowercase()).collect::<Vec<_>>(), "sizes": sizes, "min_len": len.lo, "max_len": len.hi, "timing": timing}), json!({"runs": rows})))
}

// checkers over artifacts

pub fn verify_clustering(g: &Graph, a: &Value) -> Res<Value> {
    let arr = field(a, "clusters")?.as_array().ok_or_else(|| CliError::Usage("clusters: expected a list".into()))?;
    let mut clusters = Vec::new();
    let mut centers = Vec::new();
    for c in arr {
        clusters.push(usizes(field(c, "nodes")?, "nodes")?);
        centers.push(c.get("center").map(|x| as_usize(x, "center")).transpose()?);
    }
    let centers: Option<Vec<usize>> = centers.into_iter().collect();
    let gu = a.get("guarantees").cloned().unwrap_or(json!({}));
    let mut spec = verify::ClusterSpec {
        separation: gu.get("separation").and_then(|x| x.as_i64()).map(|x| x as i128),
        diameter: gu.get("diameter").map(|x| rat(x, "diameter")).transpose()?,
        radius: gu.get("radius").map(|x| rat(x, "radius")).transpose()?,
        min_covered: gu.get("min_covered").and_then(|x| x.as_u64()).map(|x| x as usize),
    };
    let command = a.get("command").and_then(|x| x.as_str()).unwrap_or("");
    if command == "partition" || command == "cut" {
        spec.min_covered = Some(g.n());
    }
    verify::check_clustering(g, &clusters, centers.as_deref(), &spec)?;
    let mut summary = json!({"clusters": clusters.len(), "covered": clusters.iter().map(|c| c.len()).sum::<usize>()});
    if let (Some(r), Some(cs)) = (gu.get("delayed_radius"), &centers) {
        let bound = rat(r, "delayed_radius")?;
        let del: Vec<Q> = field(a, "delays")?.as_array().ok_or_else(|| CliError::Usage("delays".into()))?.iter().map(|x| rat(x, "delays")).collect::<Res<_>>()?;
        for (c, &q0) in clusters.iter().zip(cs) {
            let inside = mask_from(g.n(), c, "nodes")?;
            let d = verify::sp(g, &inside, None, &[q0], None);
            for &v in c {
                let x = d[v].ok_or_else(|| CliError::Violation(format!("delayed radius: node {} is disconnected from terminal {} in its cluster", v, q0)))?;
                if &del[q0] + qi(x) > bound {
                    return Err(CliError::Violation(format!("delayed radius: del({}) + {} > {} at node {}", q0, x, fmt_q(&bound), v)));
                }
            }
        }
    }
    if let Some(pad) = gu.get("padding").and_then(|x| x.as_u64()) {
        let n = g.n();
        let mut cluster_of = vec![u32::MAX; n];
        for (i, c) in clusters.iter().enumerate() {
            for &v in c {
                cluster_of[v] = i as u32;
            }
        }
        let w = u64s(field(a, "weights")?, "weights")?;
        let padded = verify::padded_flags(g, &cluster_of, &qu(pad));
        let unpadded: Vec<bool> = padded.iter().map(|p| !p).collect();
        let limit = rat(field(&gu, "max_unpadded_weight")?, "max_unpadded_weight")?;
        let wt = verify::check_cut_budget(&w, &unpadded, &limit)?;
        summary["unpadded_weight"] = qs(&wt);
    }
    Ok(summary)
}

pub fn verify_blur(g: &Graph, a: &Value) -> Res<Value> {
    let n = g.n();
    let s = mask_from(n, &usizes(field(a, "sources")?, "sources")?, "sources")?;
    let s_sup = mask_from(n, &usizes(field(a, "s_sup")?, "s_sup")?, "s_sup")?;
    let bad = mask_from(n, &usizes(field(a, "bad")?, "bad")?, "bad")?;
    let r = u64s(field(a, "radii")?, "radii")?;
    let w = u64s(field(a, "weights")?, "weights")?;
    if r.len() != n || w.len() != n {
        return Err(CliError::Usage("radii and weights need one value per node".into()));
    }
    let d = rat(field(a, "distance")?, "distance")?;
    let eps = rat(field(a, "eps")?, "eps")?;
    verify::check_blur(g, &Subgraph::full(g), &s, &s_sup, &bad, &r, &d)?;
    let mut summary = json!({"s_sup": true_nodes(&s_sup).len(), "bad": true_nodes(&bad).len()});
    let det = a.get("config").and_then(|c| c.get("mode")).and_then(|m| m.as_str()) == Some("det");
    if det && d > Q::zero() {
        let budget = verify::det_blur_budget(&d, &eps, &w, &r, &vec![true; n]);
        let wt = verify::check_cut_budget(&w, &bad, &budget)?;
        summary["bad_weight"] = qs(&wt);
        summary["budget"] = qs(&budget);
    }
    Ok(summary)
}

pub fn verify_star(g: &Graph, a: &Value) -> Res<Value> {
    let parts = parts_from_json(field(a, "parts")?, g.n())?;
    let mut stars = Vec::new();
    for s in field(a, "stars")?.as_array().ok_or_else(|| CliError::Usage("stars: expected a list".into()))? {
        let mut sats = Vec::new();
        for t in field(s, "satellites")?.as_array().ok_or_else(|| CliError::Usage("satellites".into()))? {
            let bridge = as_usize(field(t, "bridge")?, "bridge")?;
            if bridge >= g.m() {
                return Err(CliError::Usage(format!("bridge {} out of range", bridge)));
            }
            sats.push(Satellite { root: as_usize(field(t, "root")?, "root")?, nodes: usizes(field(t, "nodes")?, "nodes")?, anchor: as_usize(field(t, "anchor")?, "anchor")?, bridge });
        }
        stars.push(Star { root: as_usize(field(s, "root")?, "root")?, center: usizes(field(s, "center")?, "center")?, satellites: sats });
    }
    if stars.len() != parts.len() {
        return Err(CliError::Violation(format!("{} stars for {} parts", stars.len(), parts.len())));
    }
    for st in &stars {
        for &v in st.center.iter().chain(st.satellites.iter().flat_map(|s| s.nodes.iter())) {
            if v >= g.n() {
                return Err(CliError::Usage(format!("node {} out of range", v)));
            }
        }
    }
    let sd = StarDecomposition { stars, radius: rat(field(a, "radius")?, "radius")?, eps: rat(field(a, "eps")?, "eps")?, cut_weight: 0 };
    verify::check_star(g, &parts, &sd)?;
    Ok(json!({"parts": parts.len(), "satellites": sd.stars.iter().map(|s| s.satellites.len()).sum::<usize>()}))
}

pub fn verify_lsst(g: &Graph, a: &Value) -> Res<Value> {
    let edges = usizes(field(a, "edges")?, "edges")?;
    let w = match a.get("importance") {
        Some(v) => u64s(v, "importance")?,
        None => vec![1; g.m()],
    };
    if w.len() != g.m() {
        return Err(CliError::Usage("importance needs one value per edge".into()));
    }
    let (cost, _) = verify::check_tree_stretch(g, &edges, &w)?;
    if let Some(rep) = a.get("stretch_report").and_then(|r| r.get("tree_cost")).and_then(|x| x.as_str()) {
        if rep != cost.to_string() {
            return Err(CliError::Violation(format!("reported tree cost {} differs from recomputed {}", rep, cost)));
        }
    }
    let mut levels = 0;
    if let (Some(ls), Some(eps)) = (a.get("levels").and_then(|l| l.as_array()), a.get("eps")) {
        let eps = rat(eps, "eps")?;
        for l in ls {
            let j = field(l, "j")?.as_u64().ok_or_else(|| CliError::Usage("j".into()))? as u32;
            let parts = parts_from_json(field(l, "parts")?, g.n())?;
            let forest = usizes(field(l, "forest")?, "forest")?;
            if forest.iter().any(|&e| e >= g.m()) {
                return Err(CliError::Usage("forest edge out of range".into()));
            }
            verify::check_part_forest(g, &parts, &forest, &pow(&(Q::one() + &eps), j))?;
            levels += 1;
        }
    }
    Ok(json!({"tree_cost": cost.to_string(), "levels_checked": levels}))
}

pub fn verify_cover(g: &Graph, a: &Value) -> Res<Value> {
    let d = field(a, "d")?.as_u64().ok_or_else(|| CliError::Usage("d".into()))?;
    let t = field(a, "t")?.as_u64().ok_or_else(|| CliError::Usage("t".into()))? as usize;
    let parts: Vec<Vec<u32>> = field(a, "partitions")?
        .as_array()
        .ok_or_else(|| CliError::Usage("partitions".into()))?
        .iter()
        .map(|p| u64s(p, "partition").map(|v| v.into_iter().map(|x| x as u32).collect()))
        .collect::<Res<_>>()?;
    if parts.len() != t || parts.iter().any(|p| p.len() != g.n()) {
        return Err(CliError::Usage("partition shape does not match the graph".into()));
    }
    let need = if t >= cover_rounds(g.n()) as usize { (2 * t).div_ceil(3) } else { 0 };
    let counts = verify::check_cover(g, &parts, d, need)?;
    Ok(json!({"t": t, "need": need, "min_padded": counts.iter().min()}))
}

pub fn verify_embedding(g: &Graph, a: &Value, x: &[Vec<u64>]) -> Res<Value> {
    let n = g.n();
    let labeling = match field(a, "labeling")?.as_str() {
        Some("raw") => Labeling::Raw,
        Some("repetition") => Labeling::Repetition,
        other => return Err(CliError::Usage(format!("unknown labeling {:?}", other))),
    };
    let code = field(a, "code")?;
    let mut scales = Vec::new();
    for s in field(a, "scales")?.as_array().ok_or_else(|| CliError::Usage("scales".into()))? {
        let mut partitions = Vec::new();
        for p in field(s, "partitions")?.as_array().ok_or_else(|| CliError::Usage("partitions".into()))? {
            let cluster_of: Vec<u32> = u64s(p, "partition")?.into_iter().map(|c| c as u32).collect();
            if cluster_of.len() != n || cluster_of.iter().any(|&c| c as usize >= n) {
                return Err(CliError::Usage("partition shape does not match the graph".into()));
            }
            partitions.push(ScalePartition { cluster_of, padded: Vec::new(), labels: Vec::new() });
        }
        scales.push(Scale {
            i: field(s, "i")?.as_i64().unwrap_or(0) as i32,
            d: rat(field(s, "d")?, "d")?,
            diameter_bound: rat(field(s, "diameter_bound")?, "diameter_bound")?,
            partitions,
        });
    }
    let mut provenance = Vec::new();
    for c in field(a, "provenance")?.as_array().ok_or_else(|| CliError::Usage("provenance".into()))? {
        let v = u64s(c, "provenance")?;
        if v.len() != 3 || v[0] as usize >= scales.len() || v[1] as usize >= scales[v[0] as usize].partitions.len() {
            return Err(CliError::Usage("bad provenance entry".into()));
        }
        provenance.push(Coord { scale: v[0] as usize, partition: v[1] as u32, bit: v[2] as u32 });
    }
    let dims = provenance.len();
    if x.len() != n || x.iter().any(|r| r.len() != dims) {
        return Err(CliError::Usage("coordinate table does not match the sidecar".into()));
    }
    let emb = Embedding {
        dims,
        x: x.to_vec(),
        provenance,
        scales,
        t: field(a, "t")?.as_u64().unwrap_or(0) as u32,
        code_name: code["name"].as_str().unwrap_or("").into(),
        code_len: code["len"].as_u64().unwrap_or(0) as usize,
        code_distance: code["distance"].as_u64().unwrap_or(0) as usize,
    };
    let rep = verify::check_embedding(g, &emb, labeling)?;
    let dist = distortion_report(g, &emb, usize::MAX);
    if dist.max_expansion > qu(dims as u64) {
        return Err(CliError::Violation(format!("expansion {} exceeds dims {}", fmt_q(&dist.max_expansion), dims)));
    }
    if dist.max_contraction.is_none() {
        return Err(CliError::Violation(format!("pair {:?} collapses", dist.contraction_witness)));
    }
    Ok(json!({
        "pairs": rep.pairs,
        "min_certified_ratio": rep.min_certified_ratio.as_ref().map(qs),
        "max_expansion": qs(&dist.max_expansion),
        "max_contraction": dist.max_contraction.as_ref().map(qs),
    }))
}

fn read_coords(g: &Graph, p: &Path) -> Res<Vec<Vec<u64>>> {
    let text = read_text(p)?;
    let mut rows: Vec<Option<Vec<u64>>> = vec![None; g.n()];
    let index: std::collections::HashMap<u64, usize> = (0..g.n()).map(|v| (g.id(v), v)).collect();
    for (k, line) in text.lines().enumerate() {
        if k == 0 && line.starts_with("id") || line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let bad = || CliError::Usage(format!("{}: line {}: malformed row", p.display(), k + 1));
        let id: u64 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let v = *index.get(&id).ok_or_else(bad)?;
        rows[v] = Some(it.map(|t| t.trim().parse().map_err(|_| bad())).collect::<Res<_>>()?);
    }
    rows.into_iter().enumerate().map(|(v, r)| r.ok_or_else(|| CliError::Usage(format!("{}: no row for node {}", p.display(), v)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn usage_error_is_two() {
        assert_eq!(run(["lddkit", "no-such-command"]), 2);
        assert_eq!(run(["lddkit", "blur"]), 2);
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rat("25/2", "x").unwrap(), q(25, 2));
        assert!(parse_rat("-1", "x").is_err());
    }
}
