//! Rank-evaluation protocol.
//!
//! Each run draws a network and a source, simulates SI spreading, and
//! records the fractional rank of the true source in every method's score
//! table. Runs are grouped by infected-fraction band (or by fixed time) and
//! summarized by the mean and standard deviation of the rank.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use infusion::baselines::{degree_centrality_scores, distance_scores_with_penalty, integrative_rank, unreachable_penalty};
use infusion::graph::{connected_components, Graph};
use infusion::observation::InfectionSnapshot;
use infusion::rank::{Method, ScoreTable};
use infusion::simulate::{infection_times, snapshots_from_times};
use infusion::single::{infer_with, CandidateScorer, Objective, SingleConfig};
use infusion::{rng, Error, Result};

use crate::generators::{gen_asym_grid, gen_erdos_renyi, gen_grid, gen_power_law, gen_regular_tree, Network};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Er { n: usize, p: f64 },
    PowerLaw { n: usize, theta: usize },
    Grid { n: usize },
    AsymGrid { n: usize },
    RegularTree { degree: usize, depth: usize },
}

impl GeneratorSpec {
    /// Whether every run needs a fresh random graph.
    pub fn is_random(&self) -> bool {
        matches!(self, GeneratorSpec::Er { .. } | GeneratorSpec::PowerLaw { .. })
    }

    pub fn generate<R: Rng>(&self, rng: &mut R) -> Result<Network> {
        match *self {
            GeneratorSpec::Er { n, p } => Ok(Network {
                graph: gen_erdos_renyi(n, p, rng)?,
                center: None,
            }),
            GeneratorSpec::PowerLaw { n, theta } => Ok(Network {
                graph: gen_power_law(n, theta, rng)?,
                center: None,
            }),
            GeneratorSpec::Grid { n } => gen_grid(n),
            GeneratorSpec::AsymGrid { n } => gen_asym_grid(n),
            GeneratorSpec::RegularTree { degree, depth } => gen_regular_tree(degree, depth),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceRule {
    /// Uniform over the largest connected component.
    RandomInfectedRegion,
    /// The generator's designated center.
    Center,
    Fixed(usize),
}

fn default_samples() -> usize {
    1
}
fn default_min_infected() -> usize {
    10
}
fn default_max_fraction() -> f64 {
    0.75
}
fn default_max_redraws() -> usize {
    1000
}
fn default_bins() -> usize {
    infusion::single::DEFAULT_BINS
}
fn default_combine() -> Vec<Method> {
    vec![Method::NiMl, Method::NiMe, Method::Distance]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub generator: GeneratorSpec,
    pub source: SourceRule,
    /// Fixed observation times. Exactly one of `times` and `bands` is set.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    /// Infected-fraction bands `(lo, hi]`.
    #[serde(default)]
    pub bands: Option<Vec<(f64, f64)>>,
    /// Independent snapshots per run, scored jointly.
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub runs: usize,
    #[serde(with = "method_names")]
    pub methods: Vec<Method>,
    pub k: usize,
    pub seed: u64,
    /// Give the inference methods the true time instead of estimating it.
    #[serde(default)]
    pub t_known: bool,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_min_infected")]
    pub min_infected: usize,
    #[serde(default = "default_max_fraction")]
    pub max_fraction: f64,
    #[serde(default = "default_max_redraws")]
    pub max_redraws: usize,
    /// Tables averaged by the integrative method.
    #[serde(default = "default_combine", with = "method_names")]
    pub combine: Vec<Method>,
}

mod method_names {
    use infusion::rank::Method;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(methods: &[Method], s: S) -> Result<S::Ok, S::Error> {
        methods.iter().map(|m| m.name()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Method>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::param("runs must be at least 1"));
        }
        if self.samples == 0 {
            return Err(Error::param("samples must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::param("at least one method is required"));
        }
        if self.methods.contains(&Method::NiMulti) || self.combine.contains(&Method::NiMulti) {
            return Err(Error::param("ni-multi is not a single-source ranking method"));
        }
        if self.methods.contains(&Method::Integrative) {
            if self.combine.len() < 2 {
                return Err(Error::param("integrative needs at least two combined methods"));
            }
            if self.combine.contains(&Method::Integrative) {
                return Err(Error::param("integrative cannot combine itself"));
            }
        }
        if !(self.max_fraction > 0.0 && self.max_fraction <= 0.75) {
            return Err(Error::param("max_fraction must lie in (0, 0.75]"));
        }
        match (&self.times, &self.bands) {
            (Some(times), None) => {
                if times.is_empty() || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                    return Err(Error::param("times must be positive and finite"));
                }
            }
            (None, Some(bands)) => {
                if bands.is_empty() {
                    return Err(Error::param("at least one band is required"));
                }
                for &(lo, hi) in bands {
                    if !(lo >= 0.0 && lo < hi && hi <= self.max_fraction) {
                        return Err(Error::param(format!(
                            "band ({lo}, {hi}] must lie within (0, {}]",
                            self.max_fraction
                        )));
                    }
                }
            }
            _ => return Err(Error::param("exactly one of times and bands must be given")),
        }
        Ok(())
    }

    fn groups(&self) -> Vec<Group> {
        match (&self.times, &self.bands) {
            (Some(times), _) => times.iter().map(|&t| Group::Time(t)).collect(),
            (_, Some(bands)) => bands.iter().map(|&(lo, hi)| Group::Band(lo, hi)).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Group {
    Time(f64),
    Band(f64, f64),
}

impl Group {
    fn label(&self) -> String {
        match *self {
            Group::Time(t) => format!("t={t}"),
            Group::Band(lo, hi) => format!("({lo},{hi}]"),
        }
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub group: usize,
    pub run: usize,
    pub source: usize,
    /// Observation time of the snapshots.
    pub t: f64,
    /// Infected count of the first snapshot.
    pub infected: usize,
    pub candidates: usize,
    pub redraws: usize,
    /// Fractional rank of the source per method, in spec order.
    pub ranks: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub t_band: String,
    pub mean_rank: f64,
    pub std: f64,
    pub runs: usize,
    pub mean_t: f64,
    pub mean_infected: f64,
    pub redraws: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<SummaryRow>,
    pub records: Vec<RunRecord>,
}

impl ExperimentResult {
    pub fn row(&self, method: Method, group: usize) -> Option<&SummaryRow> {
        let label = self.labels().get(group)?.clone();
        self.rows.iter().find(|r| r.method == method && r.t_band == label)
    }

    fn labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for r in &self.rows {
            if !labels.contains(&r.t_band) {
                labels.push(r.t_band.clone());
            }
        }
        labels
    }

    /// CSV with header
    /// `method,t_band,mean_rank,std,runs,mean_t,mean_infected,redraws`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,t_band,mean_rank,std,runs,mean_t,mean_infected,redraws\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},\"{}\",{},{},{},{},{},{}",
                r.method, r.t_band, r.mean_rank, r.std, r.runs, r.mean_t, r.mean_infected, r.redraws
            );
        }
        out
    }
}

/// Runs every group of the experiment.
pub fn evaluate_rank(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let records = collect_records(spec, &|draw, seed| rank_methods(spec, draw, seed))?;
    Ok(summarize(spec, &spec.groups(), records))
}

/// What a custom scorer sees of one run.
pub struct RunView<'a> {
    pub graph: &'a Graph,
    pub samples: &'a [InfectionSnapshot],
    pub source: usize,
    /// Seed reserved for the scorer's own randomness.
    pub seed: u64,
}

/// Runs the drawing protocol of `spec` with a caller-supplied scorer in
/// place of the experiment's methods. Each record holds one rank.
pub fn evaluate_scorer<F>(spec: &ExperimentSpec, scorer: F) -> Result<Vec<RunRecord>>
where
    F: Fn(&RunView<'_>) -> Result<ScoreTable> + Sync,
{
    spec.validate()?;
    collect_records(spec, &|draw, seed| {
        let view = RunView {
            graph: &draw.network.graph,
            samples: &draw.samples,
            source: draw.source,
            seed,
        };
        let table = scorer(&view)?;
        let rank = table
            .rank_of(draw.source)
            .ok_or_else(|| Error::param("the source is missing from a score table"))?;
        Ok(vec![rank])
    })
}

type Ranker<'a> = dyn Fn(&Draw, u64) -> Result<Vec<f64>> + Sync + 'a;

fn collect_records(spec: &ExperimentSpec, ranker: &Ranker<'_>) -> Result<Vec<RunRecord>> {
    let fixed = if spec.generator.is_random() {
        None
    } else {
        let mut r = rng::stream(spec.seed, &[rng::tag("graph")]);
        Some(spec.generator.generate(&mut r)?)
    };
    let mut records = Vec::new();
    for (gi, group) in spec.groups().iter().enumerate() {
        let batch: Vec<RunRecord> = (0..spec.runs)
            .into_par_iter()
            .map(|run| run_once(spec, fixed.as_ref(), gi, *group, run, ranker))
            .collect::<Result<_>>()?;
        records.extend(batch);
    }
    Ok(records)
}

fn summarize(spec: &ExperimentSpec, groups: &[Group], records: Vec<RunRecord>) -> ExperimentResult {
    let mut rows = Vec::new();
    for (gi, group) in groups.iter().enumerate() {
        let recs: Vec<&RunRecord> = records.iter().filter(|r| r.group == gi).collect();
        let count = recs.len() as f64;
        let mean_t = recs.iter().map(|r| r.t).sum::<f64>() / count;
        let mean_infected = recs.iter().map(|r| r.infected as f64).sum::<f64>() / count;
        let redraws = recs.iter().map(|r| r.redraws).sum();
        for (mi, &method) in spec.methods.iter().enumerate() {
            let ranks: Vec<f64> = recs.iter().map(|r| r.ranks[mi]).collect();
            let mean = ranks.iter().sum::<f64>() / count;
            let var = if ranks.len() > 1 {
                ranks.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0)
            } else {
                0.0
            };
            rows.push(SummaryRow {
                method,
                t_band: group.label(),
                mean_rank: mean,
                std: var.sqrt(),
                runs: recs.len(),
                mean_t,
                mean_infected,
                redraws,
            });
        }
    }
    ExperimentResult { rows, records }
}

/// Drawn network, source and snapshots of one accepted attempt.
struct Draw {
    network: Network,
    source: usize,
    t: f64,
    samples: Vec<InfectionSnapshot>,
}

fn run_once(
    spec: &ExperimentSpec,
    fixed: Option<&Network>,
    gi: usize,
    group: Group,
    run: usize,
    ranker: &Ranker<'_>,
) -> Result<RunRecord> {
    let mut redraws = 0;
    loop {
        if redraws > spec.max_redraws {
            return Err(Error::param(format!(
                "run {run} of group {} found no admissible snapshot in {} attempts",
                group.label(),
                spec.max_redraws
            )));
        }
        let labels = [rng::tag("run"), gi as u64, run as u64, redraws as u64];
        let mut r = rng::stream(spec.seed, &labels);
        if let Some(draw) = try_draw(spec, fixed, group, &mut r)? {
            let kernel_seed = rng::derive_seed(spec.seed, &[rng::tag("kernel"), gi as u64, run as u64]);
            let ranks = ranker(&draw, kernel_seed)?;
            return Ok(RunRecord {
                group: gi,
                run,
                source: draw.source,
                t: draw.t,
                infected: draw.samples[0].len(),
                candidates: infusion::single::common_infected(&draw.samples).len(),
                redraws,
                ranks,
            });
        }
        redraws += 1;
    }
}

fn pick_source<R: Rng>(spec: &ExperimentSpec, net: &Network, r: &mut R) -> Result<usize> {
    let n = net.graph.node_count();
    match spec.source {
        SourceRule::Fixed(v) if v < n => Ok(v),
        SourceRule::Fixed(v) => Err(Error::NodeOutOfRange { id: v, n }),
        SourceRule::Center => net
            .center
            .ok_or_else(|| Error::param("this generator has no designated center")),
        SourceRule::RandomInfectedRegion => {
            let comps = connected_components(&net.graph);
            let largest = comps.iter().max_by_key(|c| c.len()).expect("graph has nodes");
            Ok(largest[r.random_range(0..largest.len())])
        }
    }
}

fn try_draw<R: Rng>(spec: &ExperimentSpec, fixed: Option<&Network>, group: Group, r: &mut R) -> Result<Option<Draw>> {
    let network = match fixed {
        Some(net) => net.clone(),
        None => spec.generator.generate(r)?,
    };
    let g = &network.graph;
    let n = g.node_count();
    let source = pick_source(spec, &network, r)?;
    let max_count = (spec.max_fraction * n as f64).floor() as usize;
    let admissible = |c: usize| c >= spec.min_infected && c <= max_count;

    let tau = infection_times(g, &[source], 1.0, f64::INFINITY, r);
    let t = match group {
        Group::Time(t) => t,
        Group::Band(lo, hi) => {
            // pick a count in the band, then a time at which exactly that many are infected
            let lo_count = ((lo * n as f64).floor() as usize + 1).max(spec.min_infected);
            let hi_count = ((hi * n as f64).floor() as usize).min(max_count);
            if lo_count > hi_count {
                return Err(Error::param(format!(
                    "band ({lo}, {hi}] admits no infected count on {n} nodes"
                )));
            }
            let mut sorted: Vec<f64> = tau.iter().copied().filter(|t| t.is_finite()).collect();
            sorted.sort_by(f64::total_cmp);
            let c = r.random_range(lo_count..=hi_count);
            if sorted.len() <= c {
                return Ok(None);
            }
            let (a, b) = (sorted[c - 1], sorted[c]);
            a + r.random::<f64>() * (b - a)
        }
    };
    let mut samples = snapshots_from_times(&tau, &[t]);
    for _ in 1..spec.samples {
        let more = infection_times(g, &[source], 1.0, t, r);
        samples.extend(snapshots_from_times(&more, &[t]));
    }
    if !samples.iter().all(|s| admissible(s.len())) {
        return Ok(None);
    }
    Ok(Some(Draw {
        network,
        source,
        t,
        samples,
    }))
}

/// Scores of several snapshots averaged over their common infected nodes.
fn averaged_baseline(method: Method, g: &Graph, samples: &[InfectionSnapshot], penalty: f64) -> Result<ScoreTable> {
    let candidates = infusion::single::common_infected(samples);
    let mut sums = vec![0.0; candidates.len()];
    for s in samples {
        let table = match method {
            Method::Distance => distance_scores_with_penalty(g, s, penalty),
            Method::Degree => degree_centrality_scores(g, s)?,
            _ => unreachable!("only centrality baselines are averaged here"),
        };
        for (sum, &v) in sums.iter_mut().zip(&candidates) {
            *sum += table.row(v).expect("common candidate").score;
        }
    }
    let k = samples.len() as f64;
    let entries = candidates.iter().zip(sums).map(|(&v, s)| (v, s / k, None)).collect();
    Ok(ScoreTable::from_scores(method, entries))
}

fn rank_methods(spec: &ExperimentSpec, draw: &Draw, kernel_seed: u64) -> Result<Vec<f64>> {
    let g = &draw.network.graph;
    let cfg = SingleConfig {
        k: spec.k,
        seed: kernel_seed,
        bins: spec.bins,
        ..SingleConfig::default()
    };
    let t = spec.t_known.then_some(draw.t);
    let needs = |m: Method| {
        spec.methods.contains(&m) || (spec.methods.contains(&Method::Integrative) && spec.combine.contains(&m))
    };
    let scorer = if needs(Method::NiMl) || needs(Method::NiMe) {
        Some(CandidateScorer::for_samples(g, &draw.samples, &cfg)?)
    } else {
        None
    };
    let penalty = if needs(Method::Distance) { unreachable_penalty(g) } else { 0.0 };
    let mut tables: Vec<(Method, ScoreTable)> = Vec::new();
    for m in [Method::NiMl, Method::NiMe, Method::Distance, Method::Degree] {
        if !needs(m) {
            continue;
        }
        let table = match m {
            Method::NiMl | Method::NiMe => {
                let objective = if m == Method::NiMl { Objective::Likelihood } else { Objective::Error };
                let scorer = scorer.as_ref().expect("built above");
                infer_with(scorer, &draw.samples, objective, t, None, &cfg)?.table
            }
            _ => averaged_baseline(m, g, &draw.samples, penalty)?,
        };
        tables.push((m, table));
    }
    let lookup = |m: Method| tables.iter().find(|(x, _)| *x == m).map(|(_, t)| t);
    spec.methods
        .iter()
        .map(|&m| {
            let table = if m == Method::Integrative {
                let parts: Vec<ScoreTable> = spec.combine.iter().map(|&c| lookup(c).expect("computed").clone()).collect();
                integrative_rank(&parts)?
            } else {
                lookup(m).expect("computed").clone()
            };
            table
                .rank_of(draw.source)
                .ok_or_else(|| Error::param("the source is missing from a score table"))
        })
        .collect()
}
