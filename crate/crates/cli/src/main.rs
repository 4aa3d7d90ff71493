//! `infusion` command-line tool.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags or parameter
//! values), 2 on data errors (unreadable or inconsistent input files).

mod manifest;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use infusion::baselines::{degree_centrality_scores, distance_centrality_scores, integrative_rank};
use infusion::contraction::{snapshot_series_scores, Combine};
use infusion::graph::Graph;
use infusion::io::{format_snapshot, load_edge_list, load_snapshot};
use infusion::kernel::{DiffusionKernel, EdgeLaws, ErlangLaw, KernelLaw};
use infusion::multi::{infer_multi, MultiConfig};
use infusion::observation::InfectionSnapshot;
use infusion::paths::{k_disjoint_shortest_paths, PathMetric};
use infusion::rank::{Method, ScoreTable};
use infusion::simulate::{batch_simulate, SimulationConfig};
use infusion::single::{infer, Objective, SingleConfig, DEFAULT_BINS};
use infusion_bench::experiment::{evaluate_rank, ExperimentSpec};
use infusion_bench::plot::rank_chart;

use manifest::{manifest_path_for, Manifest};

#[derive(Parser, Debug)]
#[command(name = "infusion", version, about = "Source inference for SI spreading on networks")]
struct Cli {
    /// Root seed; drawn from entropy and recorded when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate SI spreading and write snapshot files.
    Simulate(SimulateArgs),
    /// List the edge-disjoint shortest paths from one source.
    Paths(PathsArgs),
    /// Dump one kernel row.
    Kernel(KernelArgs),
    /// Score candidate sources of observed snapshots.
    Infer(InferArgs),
    /// Run a rank-evaluation experiment.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Edge-list TSV.
    #[arg(long)]
    graph: PathBuf,
    /// Treat edges as directed.
    #[arg(long)]
    directed: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    sources: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    times: Vec<f64>,
    /// Multiplier applied to every edge weight.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Output directory for snapshot files and the manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PathsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    source: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    source: usize,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Spreading rate of the homogeneous (unweighted) law.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Auto<T> {
    Auto,
    Value(T),
}

impl<T: FromStr> FromStr for Auto<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            Ok(Auto::Auto)
        } else {
            s.parse().map(Auto::Value).map_err(|e| format!("expected a number or `auto`: {e}"))
        }
    }
}

impl<T: Copy> Auto<T> {
    fn value(self) -> Option<T> {
        match self {
            Auto::Auto => None,
            Auto::Value(v) => Some(v),
        }
    }
}

#[derive(Args, Debug)]
struct InferArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Snapshot file.
    #[arg(long, conflicts_with = "snapshots", required_unless_present = "snapshots")]
    snapshot: Option<PathBuf>,
    /// Time-ordered snapshot files.
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<PathBuf>,
    /// ni-ml, ni-me, ni-multi, distance, degree or integrative.
    #[arg(long)]
    method: String,
    /// Observation time, or `auto` to estimate it. Defaults to the
    /// snapshot's own time when it has one.
    #[arg(long)]
    t: Option<Auto<f64>>,
    /// False-positive weight of NI-ME, or `auto`.
    #[arg(long, default_value = "auto")]
    alpha: Auto<f64>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Spreading rate of the homogeneous (unweighted) law.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Number of sources for ni-multi, or `auto`.
    #[arg(long, default_value = "auto")]
    m: Auto<usize>,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Methods averaged by `integrative`.
    #[arg(long, value_delimiter = ',', default_value = "ni-ml,ni-me,distance")]
    combine: Vec<String>,
    /// Time grid size when the time is estimated.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Experiment specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Summary CSV.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG chart of mean rank per group.
    #[arg(long)]
    plot: Option<PathBuf>,
}

/// Invalid flag values detected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<infusion::Error>() {
            return match err {
                infusion::Error::InvalidParameter(_) => 1,
                _ => 2,
            };
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    let seed = cli.seed.unwrap_or_else(rand::random);
    let mut argv: Vec<String> = std::env::args().skip(1).collect();
    if cli.seed.is_none() && !matches!(cli.command, Command::Bench(_)) {
        argv.push("--seed".into());
        argv.push(seed.to_string());
    }
    match cli.command {
        Command::Simulate(a) => simulate(a, seed, argv),
        Command::Paths(a) => paths(a, seed, argv),
        Command::Kernel(a) => kernel(a, seed, argv),
        Command::Infer(a) => infer_cmd(a, seed, argv),
        Command::Bench(a) => bench(a, cli.seed, argv),
    }
}

fn load_graph(args: &GraphArgs, manifest: &mut Manifest) -> Result<Graph> {
    let g = load_edge_list(&args.graph, args.directed)
        .with_context(|| format!("reading graph {}", args.graph.display()))?;
    manifest.input(&args.graph)?;
    Ok(g)
}

fn load_snapshot_checked(path: &Path, g: &Graph, manifest: &mut Manifest) -> Result<InfectionSnapshot> {
    let snap = load_snapshot(path).with_context(|| format!("reading snapshot {}", path.display()))?;
    snap.validate(g.node_count())
        .with_context(|| format!("snapshot {}", path.display()))?;
    manifest.input(path)?;
    Ok(snap)
}

/// Homogeneous law for unit-weighted graphs, per-edge rates otherwise.
fn law_for(g: &Graph, rate: f64) -> Result<KernelLaw> {
    if g.is_unit_weighted() {
        Ok(KernelLaw::Erlang(ErlangLaw::new(rate)?))
    } else {
        if rate != 1.0 {
            return Err(usage("--rate applies only to unweighted graphs; scale the weights instead"));
        }
        Ok(KernelLaw::PhaseType(EdgeLaws::new()))
    }
}

fn emit(text: &str, out: Option<&Path>, manifest: &mut Manifest) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            manifest.output(path)?;
            manifest.write(Some(&manifest_path_for(path)))
        }
        None => {
            print!("{text}");
            manifest.write(None)
        }
    }
}

fn simulate(a: SimulateArgs, seed: u64, argv: Vec<String>) -> Result<()> {
    let mut manifest = Manifest::new("simulate", argv, seed);
    let g = load_graph(&a.graph, &mut manifest)?;
    if a.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    let cfg = SimulationConfig {
        sources: a.sources.clone(),
        times: a.times.clone(),
        rate: a.rate,
        seed,
    };
    let runs = batch_simulate(&g, &cfg, a.runs)?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    for (r, snaps) in runs.iter().enumerate() {
        for (i, snap) in snaps.iter().enumerate() {
            let path = a.out.join(format!("run{r:04}_t{i}.txt"));
            std::fs::write(&path, format_snapshot(snap))
                .with_context(|| format!("cannot write {}", path.display()))?;
            manifest.output(&path)?;
        }
    }
    manifest.details = json!({
        "sources": a.sources,
        "times": a.times,
        "rate": a.rate,
        "runs": a.runs,
    });
    manifest.write(Some(&a.out.join("manifest.jsonl")))
}

fn paths(a: PathsArgs, seed: u64, argv: Vec<String>) -> Result<()> {
    let mut manifest = Manifest::new("paths", argv, seed);
    let g = load_graph(&a.graph, &mut manifest)?;
    let metric = if g.is_unit_weighted() { PathMetric::Hops } else { PathMetric::InverseRate };
    let profile = k_disjoint_shortest_paths(&g, a.source, a.k, metric, seed)?;
    let mut text = String::from("source\ttarget\tr\tlength\n");
    for target in 0..g.node_count() {
        for (r, entry) in profile.paths(target).iter().enumerate() {
            let _ = writeln!(text, "{}\t{}\t{}\t{}", a.source, target, r + 1, entry.length);
        }
    }
    manifest.details = json!({ "source": a.source, "k": a.k });
    emit(&text, a.out.as_deref(), &mut manifest)
}

fn kernel(a: KernelArgs, seed: u64, argv: Vec<String>) -> Result<()> {
    let mut manifest = Manifest::new("kernel", argv, seed);
    let g = load_graph(&a.graph, &mut manifest)?;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        return Err(usage("--t must be finite and non-negative"));
    }
    let law = law_for(&g, a.rate)?;
    let kernel = DiffusionKernel::new(&g, law, a.k, seed)?;
    let row = kernel.row(a.source, a.t)?;
    let mut text = String::from("target,probability\n");
    for (j, p) in row.probs.iter().enumerate() {
        let _ = writeln!(text, "{j},{}", p.p);
    }
    manifest.details = json!({ "source": a.source, "t": a.t, "k": a.k });
    emit(&text, a.out.as_deref(), &mut manifest)
}

fn parse_method(s: &str) -> Result<Method> {
    s.parse::<Method>().map_err(|e| usage(e.to_string()))
}

fn infer_cmd(a: InferArgs, seed: u64, argv: Vec<String>) -> Result<()> {
    let mut manifest = Manifest::new("infer", argv, seed);
    let g = load_graph(&a.graph, &mut manifest)?;
    let method = parse_method(&a.method)?;
    let files: Vec<PathBuf> = match &a.snapshot {
        Some(p) => vec![p.clone()],
        None => a.snapshots.clone(),
    };
    let snaps = files
        .iter()
        .map(|p| load_snapshot_checked(p, &g, &mut manifest))
        .collect::<Result<Vec<_>>>()?;
    let cfg = SingleConfig {
        k: a.k,
        law: law_for(&g, a.rate)?,
        seed,
        bins: a.bins,
        ..SingleConfig::default()
    };
    let t_for = |snap: &InfectionSnapshot| match a.t {
        Some(t) => t.value(),
        None => snap.time(),
    };
    let alpha = a.alpha.value();
    let mut details = json!({ "method": method.name(), "k": a.k });

    let table = if snaps.len() > 1 {
        let objective = match method {
            Method::NiMl => Objective::Likelihood,
            Method::NiMe => Objective::Error,
            _ => return Err(usage("several snapshots are supported by ni-ml and ni-me only")),
        };
        if a.t.is_some() {
            return Err(usage("--t cannot be combined with --snapshots; times come from the files"));
        }
        let res = snapshot_series_scores(&g, &snaps, objective, alpha, Combine::Average, &cfg)?;
        for w in &res.warnings {
            eprintln!("warning: {w}");
        }
        details["transition_terms"] = json!(res.transition_terms);
        res.table
    } else {
        let snap = &snaps[0];
        let single = |m: Method| -> Result<ScoreTable> {
            Ok(match m {
                Method::NiMl => infer(&g, &snaps, Objective::Likelihood, t_for(snap), alpha, &cfg)?.table,
                Method::NiMe => infer(&g, &snaps, Objective::Error, t_for(snap), alpha, &cfg)?.table,
                Method::Distance => distance_centrality_scores(&g, snap)?,
                Method::Degree => degree_centrality_scores(&g, snap)?,
                Method::NiMulti | Method::Integrative => {
                    return Err(usage(format!("{m} cannot be combined")));
                }
            })
        };
        match method {
            Method::NiMulti => {
                let mcfg = MultiConfig {
                    single: cfg.clone(),
                    epsilon: a.epsilon,
                    alpha,
                    ..MultiConfig::default()
                };
                let res = infer_multi(&g, snap, a.m.value(), t_for(snap), &mcfg)?;
                if !res.complete {
                    eprintln!(
                        "warning: only {} of {} sources could be placed",
                        res.sources.len(),
                        res.requested
                    );
                }
                details["radii"] = json!({ "d0": res.radii.d0, "d1": res.radii.d1 });
                details["m"] = json!(res.requested);
                res.table()
            }
            Method::Integrative => {
                let parts = a
                    .combine
                    .iter()
                    .map(|s| parse_method(s).and_then(single))
                    .collect::<Result<Vec<_>>>()?;
                details["combine"] = json!(a.combine);
                integrative_rank(&parts)?
            }
            m => single(m)?,
        }
    };
    if let Some(best) = table.best() {
        details["best"] = json!(best.node);
        details["t_used"] = json!(best.t_used);
    }
    manifest.details = details;
    emit(&table.to_csv(), a.out.as_deref(), &mut manifest)
}

fn bench(a: BenchArgs, seed: Option<u64>, argv: Vec<String>) -> Result<()> {
    let text = std::fs::read_to_string(&a.spec).with_context(|| format!("cannot read {}", a.spec.display()))?;
    let mut spec: ExperimentSpec = serde_json::from_str(&text).map_err(|e| {
        anyhow::Error::new(e).context(format!("invalid experiment spec {}", a.spec.display()))
    })?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let mut manifest = Manifest::new("bench", argv, spec.seed);
    manifest.input(&a.spec)?;
    if let Err(e) = spec.validate() {
        return Err(usage(e.to_string()));
    }
    let result = evaluate_rank(&spec)?;
    std::fs::write(&a.out, result.to_csv()).with_context(|| format!("cannot write {}", a.out.display()))?;
    manifest.output(&a.out)?;
    if let Some(plot) = &a.plot {
        let title = if spec.name.is_empty() { "mean rank" } else { spec.name.as_str() };
        std::fs::write(plot, rank_chart(&result, title)).with_context(|| format!("cannot write {}", plot.display()))?;
        manifest.output(plot)?;
    }
    manifest.details = json!({ "runs": spec.runs, "samples": spec.samples, "k": spec.k });
    manifest.write(Some(&manifest_path_for(&a.out)))
}
