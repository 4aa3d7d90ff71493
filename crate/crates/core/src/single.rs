//! Single-source inference: maximum likelihood (NI-ML) and minimum expected
//! weighted Hamming error (NI-ME), with estimation of the observation time.
//!
//! For candidate `i` with kernel row `p_i·(t)` and observation weights `y`:
//!
//! * `L(i, t) = Σ_j y_j ln p_ij + (1 - y_j) ln(1 - p_ij)`
//! * `H_α(i, t) = (1 - α) Σ_j y_j (1 - p_ij) + α Σ_j (1 - y_j) p_ij`
//!
//! With several samples of the same process the per-sample scores are
//! averaged and the candidates are the nodes infected in every sample.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{DiffusionKernel, KernelLaw, Prob};
use crate::observation::{Evidence, InfectionSnapshot};
use crate::paths::PathLengthProfile;
use crate::rank::{Method, ScoreTable};

pub const DEFAULT_BINS: usize = 100;
pub const DEFAULT_TOP: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct SingleConfig {
    /// Number of edge-disjoint paths per kernel entry.
    pub k: usize,
    pub law: KernelLaw,
    /// Seed for path tie-breaking.
    pub seed: u64,
    /// Grid points used when the observation time is estimated.
    pub bins: usize,
    /// Number of best candidates whose preferred times are pooled by NI-ME.
    pub top: usize,
}

impl Default for SingleConfig {
    fn default() -> Self {
        SingleConfig {
            k: 1,
            law: KernelLaw::default(),
            seed: 0,
            bins: DEFAULT_BINS,
            top: DEFAULT_TOP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Likelihood,
    Error,
}

impl Objective {
    pub fn method(self) -> Method {
        match self {
            Objective::Likelihood => Method::NiMl,
            Objective::Error => Method::NiMe,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeMethod {
    /// Supplied by the caller.
    Known,
    /// Uniform grid search on `(0, t_max]`.
    Grid,
    /// Inverted fraction of infected neighbors of one candidate.
    FirstMoment,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeEstimate {
    pub t: f64,
    pub method: TimeMethod,
    pub bins: usize,
    /// Upper end of the search range; zero when it is undefined.
    pub t_max: f64,
}

/// Scores together with how the time parameter was chosen.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleResult {
    pub table: ScoreTable,
    pub estimate: TimeEstimate,
    /// Weight of false positives used by NI-ME.
    pub alpha: Option<f64>,
    /// Best grid time of each candidate, empty unless the grid was searched.
    pub per_candidate_t: Vec<(usize, f64)>,
}

/// `(1 - α) #{y=1, x=0} + α #{y=0, x=1}`.
pub fn weighted_hamming(y: &[bool], x: &[bool], alpha: f64) -> f64 {
    assert_eq!(y.len(), x.len(), "vectors must have equal length");
    let (mut missed, mut spurious) = (0usize, 0usize);
    for (&yi, &xi) in y.iter().zip(x) {
        match (yi, xi) {
            (true, false) => missed += 1,
            (false, true) => spurious += 1,
            _ => {}
        }
    }
    (1.0 - alpha) * missed as f64 + alpha * spurious as f64
}

/// `|V^t| / n` clamped to `[1e-3, 1 - 1e-3]`.
pub fn default_alpha(snap: &InfectionSnapshot, n: usize) -> f64 {
    let a = snap.len() as f64 / n.max(1) as f64;
    a.clamp(1e-3, 1.0 - 1e-3)
}

/// `b` evenly spaced points `t_max·m/b`, `m = 1..=b`.
pub fn time_grid(t_max: f64, bins: usize) -> Vec<f64> {
    (1..=bins).map(|m| t_max * m as f64 / bins as f64).collect()
}

/// Kernel profiles of a fixed candidate set, reusable across times.
pub struct CandidateScorer<'g> {
    pub kernel: DiffusionKernel<'g>,
    pub candidates: Vec<usize>,
    pub profiles: Vec<PathLengthProfile>,
}

impl<'g> CandidateScorer<'g> {
    /// Scorer over the nodes infected in every sample.
    pub fn for_samples(g: &'g Graph, samples: &[InfectionSnapshot], cfg: &SingleConfig) -> Result<Self> {
        check_samples(samples, g.node_count())?;
        let candidates = common_infected(samples);
        if candidates.is_empty() {
            return Err(Error::param("no node is infected in every snapshot"));
        }
        Self::new(g, candidates, cfg)
    }

    pub fn new(g: &'g Graph, candidates: Vec<usize>, cfg: &SingleConfig) -> Result<Self> {
        let kernel = DiffusionKernel::new(g, cfg.law.clone(), cfg.k, cfg.seed)?;
        let profiles = kernel.profiles(&candidates)?;
        Ok(CandidateScorer {
            kernel,
            candidates,
            profiles,
        })
    }

    /// Kernel rows of every candidate at time `t`.
    pub fn rows(&self, t: f64) -> Vec<Vec<Prob>> {
        let slice = self.kernel.at(t);
        self.profiles
            .par_iter()
            .map(|profile| {
                (0..profile.node_count())
                    .map(|j| slice.value(profile, j))
                    .collect()
            })
            .collect()
    }

    /// Mean score over samples for each candidate.
    pub fn scores(&self, t: f64, evidence: &[Evidence], objective: Objective, alphas: &[f64]) -> Vec<f64> {
        let slice = self.kernel.at(t);
        let n = self.kernel.graph().node_count();
        // most targets sit on a single path, whose terms depend on its length only
        let single: Option<Vec<LogProb>> = slice
            .single_path_table(n)
            .map(|t| t.into_iter().map(LogProb::new).collect());
        let ln_q_table = slice.path_ln_q_table(n);
        self.profiles
            .par_iter()
            .map(|profile| {
                let terms: Vec<LogProb> = (0..n)
                    .map(|j| {
                        let paths = profile.paths(j);
                        match (&single, paths) {
                            (Some(table), [only]) if j != profile.source() => table[only.hops as usize],
                            (Some(_), [_, _, ..]) if j != profile.source() => {
                                let table = ln_q_table.as_ref().expect("erlang law");
                                let ln_q = paths.iter().map(|e| table[e.hops as usize]).sum();
                                LogProb::new(Prob::from_ln_q(ln_q))
                            }
                            _ => LogProb::new(slice.value(profile, j)),
                        }
                    })
                    .collect();
                let mut total = 0.0;
                for (ev, &alpha) in evidence.iter().zip(alphas) {
                    total += match objective {
                        Objective::Likelihood => log_likelihood(&terms, &ev.weights),
                        Objective::Error => {
                            let (mut missed, mut spurious) = (0.0, 0.0);
                            for (x, &y) in terms.iter().zip(&ev.weights) {
                                missed += y * x.prob.q;
                                spurious += (1.0 - y) * x.prob.p;
                            }
                            (1.0 - alpha) * missed + alpha * spurious
                        }
                    };
                }
                total / evidence.len() as f64
            })
            .collect()
    }
}

/// A probability with its logarithms computed once.
#[derive(Clone, Copy, Debug)]
struct LogProb {
    prob: Prob,
    ln_p: f64,
    ln_q: f64,
}

impl LogProb {
    fn new(prob: Prob) -> Self {
        LogProb {
            prob,
            ln_p: prob.ln_p(),
            ln_q: prob.ln_q(),
        }
    }
}

fn log_likelihood(terms: &[LogProb], weights: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, &y) in terms.iter().zip(weights) {
        if y == 1.0 {
            sum += x.ln_p;
        } else if y == 0.0 {
            sum += x.ln_q;
        } else {
            sum += y * x.ln_p + (1.0 - y) * x.ln_q;
        }
    }
    sum
}

pub fn likelihood(probs: &[Prob], weights: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (p, &y) in probs.iter().zip(weights) {
        if y == 1.0 {
            sum += p.ln_p();
        } else if y == 0.0 {
            sum += p.ln_q();
        } else {
            sum += y * p.ln_p() + (1.0 - y) * p.ln_q();
        }
    }
    sum
}

pub fn expected_error(probs: &[Prob], weights: &[f64], alpha: f64) -> f64 {
    let (mut missed, mut spurious) = (0.0, 0.0);
    for (p, &y) in probs.iter().zip(weights) {
        missed += y * p.q;
        spurious += (1.0 - y) * p.p;
    }
    (1.0 - alpha) * missed + alpha * spurious
}

fn check_samples(samples: &[InfectionSnapshot], n: usize) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::param("at least one snapshot is required"));
    }
    for s in samples {
        s.require_nonempty(n)?;
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("time must be positive and finite, got {t}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// NI-ML scores of every infected node at a known time, best first.
pub fn ni_ml_scores(g: &Graph, snap: &InfectionSnapshot, t: f64, cfg: &SingleConfig) -> Result<ScoreTable> {
    Ok(infer(g, std::slice::from_ref(snap), Objective::Likelihood, Some(t), None, cfg)?.table)
}

/// NI-ME scores of every infected node at a known time, best (lowest) first.
pub fn ni_me_scores(
    g: &Graph,
    snap: &InfectionSnapshot,
    t: f64,
    alpha: f64,
    cfg: &SingleConfig,
) -> Result<ScoreTable> {
    Ok(infer(g, std::slice::from_ref(snap), Objective::Error, Some(t), Some(alpha), cfg)?.table)
}

/// Nodes infected in every sample.
pub fn common_infected(samples: &[InfectionSnapshot]) -> Vec<usize> {
    let Some(first) = samples.first() else {
        return Vec::new();
    };
    first
        .infected()
        .iter()
        .copied()
        .filter(|&v| samples[1..].iter().all(|s| s.contains(v)))
        .collect()
}

/// Scores one or more samples of the same process.
///
/// `t = None` estimates the time: NI-ML takes the joint argmax over
/// candidates and a time grid, NI-ME takes the median of the preferred grid
/// times of its `top` best candidates. `alpha = None` uses
/// [`default_alpha`] per sample.
pub fn infer(
    g: &Graph,
    samples: &[InfectionSnapshot],
    objective: Objective,
    t: Option<f64>,
    alpha: Option<f64>,
    cfg: &SingleConfig,
) -> Result<SingleResult> {
    let scorer = CandidateScorer::for_samples(g, samples, cfg)?;
    infer_with(&scorer, samples, objective, t, alpha, cfg)
}

/// [`infer`] with kernel profiles computed once by
/// [`CandidateScorer::for_samples`], so both objectives can share them.
pub fn infer_with(
    scorer: &CandidateScorer<'_>,
    samples: &[InfectionSnapshot],
    objective: Objective,
    t: Option<f64>,
    alpha: Option<f64>,
    cfg: &SingleConfig,
) -> Result<SingleResult> {
    let g = scorer.kernel.graph();
    let n = g.node_count();
    check_samples(samples, n)?;
    if let Some(t) = t {
        check_time(t)?;
    }
    if let Some(a) = alpha {
        check_alpha(a)?;
    }
    if cfg.bins < 2 {
        return Err(Error::param("the time grid needs at least 2 bins"));
    }
    let candidates = common_infected(samples);
    if candidates != scorer.candidates {
        return Err(Error::param("scorer candidates differ from the common infected set"));
    }
    let evidence: Vec<Evidence> = samples
        .iter()
        .map(|s| Evidence::from_snapshot(s, n).map(|e| e.with_candidates(candidates.clone())))
        .collect::<Result<_>>()?;
    let alphas: Vec<f64> = match alpha {
        Some(a) => vec![a; samples.len()],
        None => samples.iter().map(|s| default_alpha(s, n)).collect(),
    };

    let (estimate, per_candidate_t) = match t {
        Some(t) => (
            TimeEstimate {
                t,
                method: TimeMethod::Known,
                bins: 0,
                t_max: 0.0,
            },
            Vec::new(),
        ),
        None => estimate_time(g, samples, scorer, &evidence, objective, &alphas, cfg)?,
    };

    let scores = scorer.scores(estimate.t, &evidence, objective, &alphas);
    let entries = candidates
        .iter()
        .zip(scores)
        .map(|(&v, s)| (v, s, Some(estimate.t)))
        .collect();
    let reported_alpha = match objective {
        Objective::Error => Some(alphas.iter().sum::<f64>() / alphas.len() as f64),
        Objective::Likelihood => None,
    };
    Ok(SingleResult {
        table: ScoreTable::from_scores(objective.method(), entries),
        estimate,
        alpha: reported_alpha,
        per_candidate_t,
    })
}

fn is_better(objective: Objective, a: f64, b: f64) -> bool {
    match objective {
        Objective::Likelihood => a > b,
        Objective::Error => a < b,
    }
}

fn estimate_time(
    g: &Graph,
    samples: &[InfectionSnapshot],
    scorer: &CandidateScorer<'_>,
    evidence: &[Evidence],
    objective: Objective,
    alphas: &[f64],
    cfg: &SingleConfig,
) -> Result<(TimeEstimate, Vec<(usize, f64)>)> {
    let n = g.node_count();
    let mut t_max = 0.0f64;
    for s in samples {
        t_max = t_max.max(infected_diameter(scorer.kernel.graph(), s, &cfg.law)?);
    }
    let degenerate = t_max <= 0.0 || samples.iter().all(|s| s.len() == n);
    if degenerate {
        let candidate = most_connected_candidate(g, samples, &scorer.candidates);
        let est = first_moment(scorer.kernel.graph(), samples, candidate, &cfg.law, 0.0)?;
        return Ok((
            TimeEstimate {
                t_max,
                bins: cfg.bins,
                ..est
            },
            Vec::new(),
        ));
    }

    let grid = time_grid(t_max, cfg.bins);
    // scores[m][c]
    let table: Vec<Vec<f64>> = grid
        .iter()
        .map(|&t| scorer.scores(t, evidence, objective, alphas))
        .collect();

    let c_count = scorer.candidates.len();
    let mut best_t = vec![0usize; c_count];
    for c in 0..c_count {
        for m in 1..grid.len() {
            if is_better(objective, table[m][c], table[best_t[c]][c]) {
                best_t[c] = m;
            }
        }
    }
    let per_candidate: Vec<(usize, f64)> = scorer
        .candidates
        .iter()
        .zip(&best_t)
        .map(|(&v, &m)| (v, grid[m]))
        .collect();

    let t = match objective {
        Objective::Likelihood => {
            // joint argmax; ties keep the earliest candidate and time
            let mut best = (0usize, best_t[0]);
            for c in 1..c_count {
                if is_better(objective, table[best_t[c]][c], table[best.1][best.0]) {
                    best = (c, best_t[c]);
                }
            }
            grid[best.1]
        }
        Objective::Error => {
            let mut order: Vec<usize> = (0..c_count).collect();
            order.sort_by(|&a, &b| table[best_t[a]][a].total_cmp(&table[best_t[b]][b]).then(a.cmp(&b)));
            let mut times: Vec<f64> = order
                .iter()
                .take(cfg.top.max(1))
                .map(|&c| grid[best_t[c]])
                .collect();
            median(&mut times)
        }
    };
    Ok((
        TimeEstimate {
            t,
            method: TimeMethod::Grid,
            bins: cfg.bins,
            t_max,
        },
        per_candidate,
    ))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Grid-based time estimate for a single snapshot.
pub fn estimate_t_grid(
    g: &Graph,
    snap: &InfectionSnapshot,
    objective: Objective,
    alpha: Option<f64>,
    cfg: &SingleConfig,
) -> Result<TimeEstimate> {
    Ok(infer(g, std::slice::from_ref(snap), objective, None, alpha, cfg)?.estimate)
}

/// `t ≈ -ln(1 - μ) / λ` where `μ` is the fraction of infected out-neighbors
/// of `candidate`. `μ = 1` is replaced by `1 - 1/(2·deg)`; a result below
/// `t_floor` is raised to it.
pub fn estimate_t_first_moment(
    g: &Graph,
    snap: &InfectionSnapshot,
    candidate: usize,
    law: &KernelLaw,
    t_floor: f64,
) -> Result<TimeEstimate> {
    snap.require_nonempty(g.node_count())?;
    if !snap.contains(candidate) {
        return Err(Error::param(format!("candidate {candidate} is not infected")));
    }
    first_moment(g, std::slice::from_ref(snap), candidate, law, t_floor)
}

const FIRST_MOMENT_FLOOR: f64 = 1e-3;

fn first_moment(
    g: &Graph,
    samples: &[InfectionSnapshot],
    candidate: usize,
    law: &KernelLaw,
    t_floor: f64,
) -> Result<TimeEstimate> {
    let arcs = g.out_arcs(candidate);
    let deg = arcs.len();
    if deg == 0 {
        return Err(Error::param(format!("node {candidate} has no neighbors")));
    }
    let infected: usize = samples
        .iter()
        .map(|s| arcs.iter().filter(|a| s.contains(a.to as usize)).count())
        .sum();
    let mut mu = infected as f64 / (deg * samples.len()) as f64;
    if mu >= 1.0 {
        mu = 1.0 - 1.0 / (2.0 * deg as f64);
    }
    let rate = match law {
        KernelLaw::Erlang(e) => e.rate,
        KernelLaw::PhaseType(_) => arcs.iter().map(|a| g.weight(a.edge)).sum::<f64>() / deg as f64,
    };
    let floor = if t_floor > 0.0 { t_floor } else { FIRST_MOMENT_FLOOR };
    let t = (-(-mu).ln_1p() / rate).max(floor);
    Ok(TimeEstimate {
        t,
        method: TimeMethod::FirstMoment,
        bins: 0,
        t_max: 0.0,
    })
}

/// Candidate with the most infected out-neighbors over all samples; ties go
/// to the smallest id.
fn most_connected_candidate(g: &Graph, samples: &[InfectionSnapshot], candidates: &[usize]) -> usize {
    let count = |v: usize| -> usize {
        samples
            .iter()
            .map(|s| g.out_neighbors(v).filter(|&w| s.contains(w)).count())
            .sum()
    };
    let mut best = candidates[0];
    let mut best_count = count(best);
    for &v in &candidates[1..] {
        let c = count(v);
        if c > best_count {
            best = v;
            best_count = c;
        }
    }
    best
}

/// Longest finite shortest path inside the infected subgraph: hop count for
/// the Erlang law (divided by its rate), mean holding time otherwise.
fn infected_diameter(g: &Graph, snap: &InfectionSnapshot, law: &KernelLaw) -> Result<f64> {
    let sub = crate::graph::induced_infected_subgraph(g, snap)?;
    let h = &sub.graph;
    Ok(match law {
        KernelLaw::Erlang(e) => f64::from(crate::graph::diameter(h)) / e.rate,
        KernelLaw::PhaseType(_) => weighted_diameter(h),
    })
}

fn weighted_diameter(g: &Graph) -> f64 {
    let n = g.node_count();
    let mut best = 0.0f64;
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for s in 0..n {
        dist.fill(f64::INFINITY);
        dist[s] = 0.0;
        heap.push(Reverse((OrdF64(0.0), s)));
        while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            best = best.max(d);
            for a in g.out_arcs(u) {
                let v = a.to as usize;
                let nd = d + 1.0 / g.weight(a.edge);
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((OrdF64(nd), v)));
                }
            }
        }
    }
    best
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::erlang_cdf;

    fn line(n: usize) -> Graph {
        Graph::unweighted(n, false, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn hamming_examples() {
        let y = [true, false, false];
        let x = [false, true, true];
        assert!((weighted_hamming(&y, &x, 0.25) - 1.25).abs() < 1e-15);
        assert_eq!(weighted_hamming(&y, &y, 0.3), 0.0);
        assert_eq!(weighted_hamming(&y, &x, 0.5), weighted_hamming(&x, &y, 0.5));
        assert_eq!(weighted_hamming(&y, &x, 0.5), 1.5);
    }

    #[test]
    fn alpha_defaults() {
        let snap = InfectionSnapshot::new(None, (0..25).collect());
        assert!((default_alpha(&snap, 250) - 0.1).abs() < 1e-15);
        let all = InfectionSnapshot::new(None, (0..10).collect());
        assert_eq!(default_alpha(&all, 10), 0.999);
        let one = InfectionSnapshot::new(None, vec![3]);
        assert_eq!(default_alpha(&one, 1000), 0.001);
    }

    #[test]
    fn grid_definition() {
        assert_eq!(time_grid(4.0, 2), vec![2.0, 4.0]);
    }

    #[test]
    fn line_scores_match_products() {
        let g = line(4);
        let snap = InfectionSnapshot::new(Some(1.0), vec![0, 1, 2]);
        let table = ni_ml_scores(&g, &snap, 1.0, &SingleConfig::default()).unwrap();
        let f = |l| erlang_cdf(l, 1.0, 1.0);
        let node1 = (f(1) * f(1) * (1.0 - f(2))).ln();
        let got = table.row(1).unwrap().score;
        assert!((got - node1).abs() < 1e-9, "{got} {node1}");
    }

    #[test]
    fn single_infected_node() {
        let g = line(4);
        let snap = InfectionSnapshot::new(None, vec![2]);
        let r = infer(&g, &[snap], Objective::Likelihood, None, None, &SingleConfig::default()).unwrap();
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.table.rank_of(2), Some(1.0));
        assert_eq!(r.estimate.method, TimeMethod::FirstMoment);
    }

    #[test]
    fn first_moment_rules() {
        let star = Graph::unweighted(5, false, (1..5).map(|i| (0, i))).unwrap();
        let law = KernelLaw::default();
        let all = InfectionSnapshot::new(None, vec![0, 1, 2, 3, 4]);
        let est = estimate_t_first_moment(&star, &all, 0, &law, 0.0).unwrap();
        assert!((est.t - 8.0f64.ln()).abs() < 1e-12);
        let none = InfectionSnapshot::new(None, vec![0]);
        let est = estimate_t_first_moment(&star, &none, 0, &law, 0.05).unwrap();
        assert_eq!(est.t, 0.05);
    }

    #[test]
    fn me_prefers_star_center() {
        let star = Graph::unweighted(7, false, (1..7).map(|i| (0, i))).unwrap();
        let snap = InfectionSnapshot::new(None, (0..7).collect());
        for &alpha in &[0.1, 0.5, 0.9] {
            let t = ni_me_scores(&star, &snap, 1.0, alpha, &SingleConfig::default()).unwrap();
            assert_eq!(t.best().unwrap().node, 0);
            assert_eq!(t.rank_of(0), Some(1.0));
        }
    }

    #[test]
    fn ml_grid_is_a_joint_argmax() {
        let g = line(9);
        let snap = InfectionSnapshot::new(None, vec![2, 3, 4, 5]);
        let cfg = SingleConfig {
            bins: 20,
            ..SingleConfig::default()
        };
        let r = infer(&g, &[snap.clone()], Objective::Likelihood, None, None, &cfg).unwrap();
        let best = r.table.best().unwrap().score;
        for &t in &time_grid(r.estimate.t_max, 20) {
            let table = ni_ml_scores(&g, &snap, t, &cfg).unwrap();
            for row in table.rows() {
                assert!(row.score <= best + 1e-12);
            }
        }
        assert_eq!(r.estimate.t_max, 3.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = line(4);
        let empty = InfectionSnapshot::new(None, vec![]);
        assert!(matches!(
            ni_ml_scores(&g, &empty, 1.0, &SingleConfig::default()),
            Err(Error::EmptyInfectedSet)
        ));
        let snap = InfectionSnapshot::new(None, vec![0, 1]);
        assert!(ni_ml_scores(&g, &snap, 0.0, &SingleConfig::default()).is_err());
        assert!(ni_me_scores(&g, &snap, 1.0, 1.5, &SingleConfig::default()).is_err());
        let far = InfectionSnapshot::new(None, vec![0, 9]);
        assert!(matches!(
            ni_ml_scores(&g, &far, 1.0, &SingleConfig::default()),
            Err(Error::NodeOutOfRange { id: 9, .. })
        ));
    }
}
