//! Multi-source inference.
//!
//! With sources `S`, node `j` escapes infection only if it escapes every
//! source, so `Pr[y_j = 1] = 1 - Π_{s∈S} (1 - p_sj)`. Sources are found
//! greedily with the localized likelihood: each candidate is scored only
//! over its disk `D(i, d0)`, and once a source is picked its disk
//! `D(s, d1)` is excluded from later picks.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{connected_components, disk, induced_infected_subgraph, Graph};
use crate::kernel::{erlang_cdf, ErlangTable, KernelLaw, Prob};
use crate::observation::{Evidence, InfectionSnapshot};
use crate::rank::{Method, ScoreTable};
use crate::single::{
    default_alpha, time_grid, CandidateScorer, Objective, SingleConfig, TimeEstimate, TimeMethod,
};

/// Hop radii where the path CDF crosses `1/2` and `ε/(nm)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceRadii {
    /// Largest `d` with `F(d, t) > 1/2`, at least 1.
    pub d0: u32,
    /// Smallest `d` with `F(d, t) < ε/(nm)`.
    pub d1: u32,
    pub epsilon: f64,
    pub m: usize,
    pub t: f64,
}

const MAX_RADIUS: u32 = 1 << 20;

pub fn compute_radii(t: f64, n: usize, m: usize, epsilon: f64, rate: f64) -> Result<CoherenceRadii> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("time must be positive and finite, got {t}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if m == 0 || n == 0 {
        return Err(Error::param("n and m must be at least 1"));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::param("rate must be positive and finite"));
    }
    let threshold = epsilon / (n as f64 * m as f64);
    let mut d0 = 1;
    let mut d = 1;
    while erlang_cdf(d, t, rate) > 0.5 {
        d0 = d;
        d += 1;
    }
    let mut d1 = 1;
    while erlang_cdf(d1, t, rate) >= threshold {
        d1 += 1;
        if d1 > MAX_RADIUS {
            return Err(Error::param("exclusion radius did not converge"));
        }
    }
    Ok(CoherenceRadii {
        d0,
        d1,
        epsilon,
        m,
        t,
    })
}

/// Number of connected components of the infected subgraph.
pub fn estimate_num_sources(g: &Graph, snap: &InfectionSnapshot) -> Result<usize> {
    let sub = induced_infected_subgraph(g, snap)?;
    snap.require_nonempty(g.node_count())?;
    Ok(connected_components(&sub.graph).len())
}

fn check_sources(sources: &[usize], n: usize) -> Result<()> {
    if sources.is_empty() {
        return Err(Error::param("at least one source is required"));
    }
    if let Some(&s) = sources.iter().find(|&&s| s >= n) {
        return Err(Error::NodeOutOfRange { id: s, n });
    }
    let mut sorted = sources.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("sources must be distinct"));
    }
    Ok(())
}

/// `ln Π_s (1 - p_sj)` for every node.
fn joint_ln_q(rows: &[Vec<Prob>], n: usize) -> Vec<f64> {
    (0..n).map(|j| rows.iter().map(|r| r[j].ln_q()).sum()).collect()
}

/// Multi-source log-likelihood of evidence for a source set at time `t`.
pub fn evidence_likelihood(scorer: &CandidateScorer<'_>, sources: &[usize], t: f64, evidence: &Evidence) -> Result<f64> {
    let rows = source_rows(scorer, sources, t)?;
    let n = evidence.node_count();
    let mut total = 0.0;
    for (j, ln_q) in joint_ln_q(&rows, n).into_iter().enumerate() {
        let p = Prob::from_ln_q(ln_q);
        let y = evidence.weights[j];
        total += y * p.ln_p() + (1.0 - y) * p.ln_q();
    }
    Ok(total)
}

/// Multi-source expected weighted Hamming error of evidence.
pub fn evidence_error(
    scorer: &CandidateScorer<'_>,
    sources: &[usize],
    t: f64,
    alpha: f64,
    evidence: &Evidence,
) -> Result<f64> {
    let rows = source_rows(scorer, sources, t)?;
    let n = evidence.node_count();
    let (mut missed, mut spurious) = (0.0, 0.0);
    for (j, ln_q) in joint_ln_q(&rows, n).into_iter().enumerate() {
        let p = Prob::from_ln_q(ln_q);
        let y = evidence.weights[j];
        missed += y * p.q;
        spurious += (1.0 - y) * p.p;
    }
    Ok((1.0 - alpha) * missed + alpha * spurious)
}

/// Kernel rows of `sources`, reusing the scorer's profiles where possible.
fn source_rows(scorer: &CandidateScorer<'_>, sources: &[usize], t: f64) -> Result<Vec<Vec<Prob>>> {
    let n = scorer.kernel.graph().node_count();
    check_sources(sources, n)?;
    let slice = scorer.kernel.at(t);
    sources
        .iter()
        .map(|&s| {
            let row = match scorer.candidates.binary_search(&s) {
                Ok(idx) => slice.row(&scorer.profiles[idx]),
                Err(_) => slice.row(&scorer.kernel.profile(s)?),
            };
            Ok(row.probs)
        })
        .collect()
}

pub fn multi_source_likelihood(
    g: &Graph,
    snap: &InfectionSnapshot,
    sources: &[usize],
    t: f64,
    cfg: &SingleConfig,
) -> Result<f64> {
    let evidence = Evidence::from_snapshot(snap, g.node_count())?;
    check_sources_infected(snap, sources)?;
    let scorer = CandidateScorer::new(g, Vec::new(), cfg)?;
    evidence_likelihood(&scorer, sources, t, &evidence)
}

pub fn multi_source_error(
    g: &Graph,
    snap: &InfectionSnapshot,
    sources: &[usize],
    t: f64,
    alpha: f64,
    cfg: &SingleConfig,
) -> Result<f64> {
    let evidence = Evidence::from_snapshot(snap, g.node_count())?;
    check_sources_infected(snap, sources)?;
    let scorer = CandidateScorer::new(g, Vec::new(), cfg)?;
    evidence_error(&scorer, sources, t, alpha, &evidence)
}

fn check_sources_infected(snap: &InfectionSnapshot, sources: &[usize]) -> Result<()> {
    if let Some(s) = sources.iter().find(|&&s| !snap.contains(s)) {
        return Err(Error::param(format!("source {s} is not infected")));
    }
    Ok(())
}

/// Localized score of every candidate: the single-source objective summed
/// over `D(i, d0)` only.
pub fn localized_scores(
    scorer: &CandidateScorer<'_>,
    evidence: &Evidence,
    t: f64,
    d0: u32,
    objective: Objective,
    alpha: f64,
) -> Vec<f64> {
    let g = scorer.kernel.graph();
    let slice = scorer.kernel.at(t);
    scorer
        .profiles
        .par_iter()
        .zip(&scorer.candidates)
        .map(|(profile, &i)| {
            let mut like = 0.0;
            let (mut missed, mut spurious) = (0.0, 0.0);
            for j in disk(g, i, d0) {
                let p = slice.value(profile, j);
                let y = evidence.weights[j];
                like += y * p.ln_p() + (1.0 - y) * p.ln_q();
                missed += y * p.q;
                spurious += (1.0 - y) * p.p;
            }
            match objective {
                Objective::Likelihood => like,
                Objective::Error => (1.0 - alpha) * missed + alpha * spurious,
            }
        })
        .collect()
}

pub fn localized_likelihood(
    g: &Graph,
    snap: &InfectionSnapshot,
    i: usize,
    t: f64,
    d0: u32,
    cfg: &SingleConfig,
) -> Result<f64> {
    if d0 == 0 {
        return Err(Error::param("d0 must be at least 1"));
    }
    let evidence = Evidence::from_snapshot(snap, g.node_count())?;
    check_sources_infected(snap, &[i])?;
    let scorer = CandidateScorer::new(g, vec![i], cfg)?;
    Ok(localized_scores(&scorer, &evidence, t, d0, Objective::Likelihood, 0.5)[0])
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiConfig {
    pub single: SingleConfig,
    pub epsilon: f64,
    /// Localized likelihood (default) or localized expected error.
    pub objective: Objective,
    /// False-positive weight for the error objective; `None` uses the
    /// default.
    pub alpha: Option<f64>,
}

impl Default for MultiConfig {
    fn default() -> Self {
        MultiConfig {
            single: SingleConfig::default(),
            epsilon: 0.05,
            objective: Objective::Likelihood,
            alpha: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiResult {
    /// Picked sources in order.
    pub sources: Vec<usize>,
    /// Localized score of each pick.
    pub scores: Vec<f64>,
    /// False when the candidate pool ran out before `m` picks.
    pub complete: bool,
    pub requested: usize,
    pub radii: CoherenceRadii,
    pub estimate: TimeEstimate,
    /// Multi-source objective of the picked set at the chosen time.
    pub objective_value: f64,
}

impl MultiResult {
    /// Picks ranked in order, scored by their localized objective.
    pub fn table(&self) -> ScoreTable {
        let t = Some(self.estimate.t);
        let rows = self
            .sources
            .iter()
            .zip(&self.scores)
            .enumerate()
            .map(|(r, (&node, &score))| crate::rank::ScoreRow {
                node,
                score,
                t_used: t,
                rank: (r + 1) as f64,
            })
            .collect();
        ScoreTable::from_rows(Method::NiMulti, rows)
    }
}

fn law_rate(law: &KernelLaw) -> f64 {
    match law {
        KernelLaw::Erlang(e) => e.rate,
        KernelLaw::PhaseType(_) => 1.0,
    }
}

struct Picks {
    sources: Vec<usize>,
    scores: Vec<f64>,
    complete: bool,
}

/// Greedy selection from precomputed localized scores: the best remaining
/// candidate (smallest id on ties), then removal of its `D(s, d1)`.
fn greedy_picks(g: &Graph, candidates: &[usize], scores: &[f64], m: usize, d1: u32, objective: Objective) -> Picks {
    let mut excluded = vec![false; g.node_count()];
    let mut sources = Vec::with_capacity(m);
    let mut picked_scores = Vec::with_capacity(m);
    for _ in 0..m {
        let mut best: Option<usize> = None;
        for (idx, &v) in candidates.iter().enumerate() {
            if excluded[v] {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => match objective {
                    Objective::Likelihood => scores[idx] > scores[b],
                    Objective::Error => scores[idx] < scores[b],
                },
            };
            if better {
                best = Some(idx);
            }
        }
        let Some(idx) = best else {
            return Picks {
                sources,
                scores: picked_scores,
                complete: false,
            };
        };
        let s = candidates[idx];
        sources.push(s);
        picked_scores.push(scores[idx]);
        excluded[s] = true;
        for v in disk(g, s, d1) {
            excluded[v] = true;
        }
    }
    Picks {
        sources,
        scores: picked_scores,
        complete: true,
    }
}

/// Greedy localized multi-source inference on evidence at a known time.
///
/// Only candidates listed in `evidence` are considered. With one path per
/// pair and the Erlang law the kernel on a disk depends on hop distance
/// alone, so scores are computed from a bounded search instead of full
/// kernel profiles.
pub fn greedy_evidence(
    g: &Graph,
    evidence: &Evidence,
    m: usize,
    t: f64,
    cfg: &MultiConfig,
) -> Result<MultiResult> {
    let scorer = CandidateScorer::new(g, Vec::new(), &cfg.single)?;
    let hop_only = cfg.single.k == 1 && matches!(cfg.single.law, KernelLaw::Erlang(_));
    let full = if hop_only {
        None
    } else {
        Some(CandidateScorer::new(g, evidence.candidates.clone(), &cfg.single)?)
    };
    greedy_with(&scorer, full.as_ref(), evidence, m, t, cfg)
}

fn greedy_with(
    scorer: &CandidateScorer<'_>,
    full: Option<&CandidateScorer<'_>>,
    evidence: &Evidence,
    m: usize,
    t: f64,
    cfg: &MultiConfig,
) -> Result<MultiResult> {
    if m == 0 {
        return Err(Error::param("m must be at least 1"));
    }
    let g = scorer.kernel.graph();
    let rate = law_rate(&cfg.single.law);
    let radii = compute_radii(t, g.node_count(), m, cfg.epsilon, rate)?;
    let alpha = cfg.alpha.unwrap_or(default_alpha_weights(evidence));
    let scores = match full {
        Some(full) => localized_scores(full, evidence, t, radii.d0, cfg.objective, alpha),
        None => localized_hop_scores(g, &evidence.candidates, evidence, t, rate, radii.d0, cfg.objective, alpha),
    };
    let picks = greedy_picks(g, &evidence.candidates, &scores, m, radii.d1, cfg.objective);
    let objective_value = if picks.sources.is_empty() {
        f64::NAN
    } else {
        let scorer = full.unwrap_or(scorer);
        match cfg.objective {
            Objective::Likelihood => evidence_likelihood(scorer, &picks.sources, t, evidence)?,
            Objective::Error => evidence_error(scorer, &picks.sources, t, alpha, evidence)?,
        }
    };
    Ok(MultiResult {
        sources: picks.sources,
        scores: picks.scores,
        complete: picks.complete,
        requested: m,
        radii,
        estimate: TimeEstimate {
            t,
            method: TimeMethod::Known,
            bins: 0,
            t_max: 0.0,
        },
        objective_value,
    })
}

/// [`localized_scores`] for a single shortest path under the Erlang law,
/// where `p_ij = F(d_ij, t)`.
#[allow(clippy::too_many_arguments)]
fn localized_hop_scores(
    g: &Graph,
    candidates: &[usize],
    evidence: &Evidence,
    t: f64,
    rate: f64,
    d0: u32,
    objective: Objective,
    alpha: f64,
) -> Vec<f64> {
    let table = ErlangTable::new(rate, t, d0 as usize);
    let probs: Vec<Prob> = (0..d0 as usize)
        .map(|d| {
            if d == 0 {
                Prob::CAP
            } else {
                Prob::clamped(table.cdf(d), table.sf(d))
            }
        })
        .collect();
    candidates
        .par_iter()
        .map(|&i| {
            let mut like = 0.0;
            let (mut missed, mut spurious) = (0.0, 0.0);
            for (j, d) in disk_distances(g, i, d0) {
                let p = probs[d as usize];
                let y = evidence.weights[j];
                like += y * p.ln_p() + (1.0 - y) * p.ln_q();
                missed += y * p.q;
                spurious += (1.0 - y) * p.p;
            }
            match objective {
                Objective::Likelihood => like,
                Objective::Error => (1.0 - alpha) * missed + alpha * spurious,
            }
        })
        .collect()
}

/// Members of `D(center, radius)` with their hop distances.
fn disk_distances(g: &Graph, center: usize, radius: u32) -> Vec<(usize, u32)> {
    let mut out = vec![(center, 0u32)];
    let mut head = 0;
    let mut seen = std::collections::HashSet::from([center]);
    while head < out.len() {
        let (v, d) = out[head];
        head += 1;
        if d + 1 >= radius {
            continue;
        }
        for w in g.out_neighbors(v) {
            if seen.insert(w) {
                out.push((w, d + 1));
            }
        }
    }
    out
}

fn default_alpha_weights(evidence: &Evidence) -> f64 {
    (evidence.mass() / evidence.node_count().max(1) as f64).clamp(1e-3, 1.0 - 1e-3)
}

/// Greedy multi-source inference at a known time.
pub fn greedy_multi_source(
    g: &Graph,
    snap: &InfectionSnapshot,
    m: usize,
    t: f64,
    cfg: &MultiConfig,
) -> Result<MultiResult> {
    infer_multi(g, snap, Some(m), Some(t), cfg)
}

/// Greedy multi-source inference. `m = None` uses the number of infected
/// components. `t = None` runs the greedy search at every point of the
/// time grid and keeps the pick set with the best multi-source objective.
pub fn infer_multi(
    g: &Graph,
    snap: &InfectionSnapshot,
    m: Option<usize>,
    t: Option<f64>,
    cfg: &MultiConfig,
) -> Result<MultiResult> {
    let n = g.node_count();
    let evidence = Evidence::from_snapshot(snap, n)?;
    if let Some(a) = cfg.alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::param(format!("alpha must lie in (0, 1), got {a}")));
        }
    }
    let m = match m {
        Some(m) => m,
        None => estimate_num_sources(g, snap)?,
    };
    let cfg = MultiConfig {
        alpha: Some(cfg.alpha.unwrap_or(default_alpha(snap, n))),
        ..cfg.clone()
    };
    let scorer = CandidateScorer::new(g, Vec::new(), &cfg.single)?;
    let hop_only = cfg.single.k == 1 && matches!(cfg.single.law, KernelLaw::Erlang(_));
    let full = if hop_only {
        None
    } else {
        Some(CandidateScorer::new(g, evidence.candidates.clone(), &cfg.single)?)
    };
    if let Some(t) = t {
        return greedy_with(&scorer, full.as_ref(), &evidence, m, t, &cfg);
    }

    if cfg.single.bins < 2 {
        return Err(Error::param("the time grid needs at least 2 bins"));
    }
    let sub = induced_infected_subgraph(scorer.kernel.graph(), snap)?;
    let t_max = f64::from(crate::graph::diameter(&sub.graph)) / law_rate(&cfg.single.law);
    if t_max <= 0.0 {
        // no infected edges: every component is a lone node
        let t = crate::single::estimate_t_first_moment(g, snap, snap.infected()[0], &cfg.single.law, 0.0)
            .map(|e| e.t)
            .unwrap_or(1.0);
        let mut r = greedy_with(&scorer, full.as_ref(), &evidence, m, t, &cfg)?;
        r.estimate = TimeEstimate {
            t,
            method: TimeMethod::FirstMoment,
            bins: cfg.single.bins,
            t_max,
        };
        return Ok(r);
    }
    let mut best: Option<MultiResult> = None;
    for t in time_grid(t_max, cfg.single.bins) {
        let r = greedy_with(&scorer, full.as_ref(), &evidence, m, t, &cfg)?;
        let better = match &best {
            None => true,
            Some(b) => match cfg.objective {
                Objective::Likelihood => r.objective_value > b.objective_value,
                Objective::Error => r.objective_value < b.objective_value,
            },
        };
        if better {
            best = Some(r);
        }
    }
    let mut r = best.expect("grid is nonempty");
    r.estimate = TimeEstimate {
        t: r.estimate.t,
        method: TimeMethod::Grid,
        bins: cfg.single.bins,
        t_max,
    };
    Ok(r)
}

/// Best two-source sets by exhaustive search over all candidate pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSearch {
    pub best: f64,
    /// Every pair within a relative `1e-12` of the best value.
    pub maximizers: Vec<(usize, usize)>,
    pub evaluated: usize,
}

/// Exhaustive maximization of the two-source likelihood; test oracle for
/// small candidate sets.
pub fn exhaustive_pairs(scorer: &CandidateScorer<'_>, evidence: &Evidence, t: f64) -> Result<PairSearch> {
    let c = &scorer.candidates;
    if c.len() < 2 {
        return Err(Error::param("exhaustive pair search needs at least two candidates"));
    }
    let slice = scorer.kernel.at(t);
    let n = evidence.node_count();
    let ln_q: Vec<Vec<f64>> = scorer
        .profiles
        .iter()
        .map(|p| (0..n).map(|j| slice.value(p, j).ln_q()).collect())
        .collect();
    let mut values = Vec::new();
    for a in 0..c.len() {
        for b in a + 1..c.len() {
            let mut total = 0.0;
            for j in 0..n {
                let p = Prob::from_ln_q(ln_q[a][j] + ln_q[b][j]);
                let y = evidence.weights[j];
                total += y * p.ln_p() + (1.0 - y) * p.ln_q();
            }
            values.push(((c[a], c[b]), total));
        }
    }
    let best = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1.0);
    let maximizers = values
        .iter()
        .filter(|v| v.1 >= best - tol)
        .map(|v| v.0)
        .collect();
    Ok(PairSearch {
        best,
        maximizers,
        evaluated: values.len(),
    })
}
