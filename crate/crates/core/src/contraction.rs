//! Inference from several snapshots of one process.
//!
//! Nodes infected by the earlier snapshot are merged into one super-node
//! `x`. Each remaining node keeps its edges, and its edges into the infected
//! set collapse into a single edge to `x` whose weight is the sum of the
//! originals. By memorylessness, the later snapshot given the earlier one
//! behaves like a single-source process started at `x`.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{DiffusionKernel, EdgeLaws, KernelLaw};
use crate::observation::{Evidence, InfectionSnapshot};
use crate::rank::ScoreTable;
use crate::single::{self, likelihood, expected_error, default_alpha, Objective, SingleConfig, SingleResult};

/// Graph with an infected set merged into a super-node.
#[derive(Clone, Debug)]
pub struct ContractionGraph {
    pub graph: Graph,
    /// Id of the super-node, always the last node.
    pub super_node: usize,
    /// Original id to contracted id; infected nodes map to the super-node.
    pub to_contracted: Vec<usize>,
    /// Contracted id to original id, for every node except the super-node.
    pub original: Vec<usize>,
}

impl ContractionGraph {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

/// Merges the infected nodes of `snap` into one super-node.
pub fn contract(g: &Graph, snap: &InfectionSnapshot) -> Result<ContractionGraph> {
    let n = g.node_count();
    snap.require_nonempty(n)?;
    let infected = snap.mask(n);
    let original: Vec<usize> = (0..n).filter(|&v| !infected[v]).collect();
    let super_node = original.len();
    let mut to_contracted = vec![super_node; n];
    for (new, &old) in original.iter().enumerate() {
        to_contracted[old] = new;
    }
    // boundary weight per outside node, in each direction
    let mut into_x = vec![0.0; super_node];
    let mut from_x = vec![0.0; super_node];
    let mut edges = Vec::new();
    for e in g.edges() {
        let (u, v) = (e.src as usize, e.dst as usize);
        match (infected[u], infected[v]) {
            (true, true) => {}
            (false, false) => edges.push((to_contracted[u], to_contracted[v], e.weight)),
            (false, true) => into_x[to_contracted[u]] += e.weight,
            (true, false) => from_x[to_contracted[v]] += e.weight,
        }
    }
    for i in 0..super_node {
        if g.is_directed() {
            if from_x[i] > 0.0 {
                edges.push((super_node, i, from_x[i]));
            }
            if into_x[i] > 0.0 {
                edges.push((i, super_node, into_x[i]));
            }
        } else {
            let w = into_x[i] + from_x[i];
            if w > 0.0 {
                edges.push((i, super_node, w));
            }
        }
    }
    let graph = Graph::from_edges(super_node + 1, g.is_directed(), edges)?;
    Ok(ContractionGraph {
        graph,
        super_node,
        to_contracted,
        original,
    })
}

/// How per-snapshot scores are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Combine {
    /// Mean of the single-snapshot scores.
    #[default]
    Average,
    /// Score on the first snapshot plus the candidate-independent
    /// likelihood of each later snapshot given the one before.
    ChainRule,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotSeriesResult {
    pub table: ScoreTable,
    /// Single-snapshot result for each snapshot, on the common candidates.
    pub per_snapshot: Vec<SingleResult>,
    /// Conditional term of each consecutive pair, identical for every
    /// candidate.
    pub transition_terms: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Checks that infections never disappear between snapshots.
pub fn check_monotone(snaps: &[InfectionSnapshot]) -> Result<()> {
    for w in snaps.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if let (Some(ta), Some(tb)) = (a.time(), b.time()) {
            if !(tb > ta) {
                return Err(Error::param(format!("snapshot times must increase, got {ta} then {tb}")));
            }
        }
        if let Some(&node) = a.infected().iter().find(|&&v| !b.contains(v)) {
            return Err(Error::Recovery {
                node,
                earlier: a.time().unwrap_or(f64::NAN),
                later: b.time().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(())
}

/// Law on the contracted graph: plain exponential edges with the summed
/// weights scaled by the base rate.
fn contracted_law(law: &KernelLaw) -> (f64, Option<String>) {
    match law {
        KernelLaw::Erlang(e) => (e.rate, None),
        KernelLaw::PhaseType(laws) if laws.is_empty() => (1.0, None),
        KernelLaw::PhaseType(_) => (
            1.0,
            Some("mixture edge laws are not memoryless; the transition term treats them as exponential".into()),
        ),
    }
}

/// Score of snapshot `later` given `earlier` at elapsed time `dt`, for the
/// process restarted at the super-node.
pub fn transition_term(
    g: &Graph,
    earlier: &InfectionSnapshot,
    later: &InfectionSnapshot,
    dt: f64,
    objective: Objective,
    alpha: f64,
    cfg: &SingleConfig,
) -> Result<f64> {
    check_monotone(&[earlier.clone(), later.clone()])?;
    let c = contract(g, earlier)?;
    let (rate, _) = contracted_law(&cfg.law);
    let scaled = Graph::from_edges(
        c.graph.node_count(),
        c.graph.is_directed(),
        c.graph.edges().iter().map(|e| (e.src as usize, e.dst as usize, e.weight * rate)),
    )?;
    let kernel = DiffusionKernel::new(&scaled, KernelLaw::PhaseType(EdgeLaws::new()), cfg.k, cfg.seed)?;
    let profile = kernel.profile(c.super_node)?;
    let row = kernel.at(dt).row(&profile);
    let mut weights = vec![0.0; c.node_count()];
    weights[c.super_node] = 1.0;
    for &v in later.infected() {
        weights[c.to_contracted[v]] = 1.0;
    }
    Ok(match objective {
        Objective::Likelihood => likelihood(&row.probs, &weights),
        Objective::Error => expected_error(&row.probs, &weights, alpha),
    })
}

/// Scores candidate sources from a time-ordered series of snapshots. The
/// candidates are the nodes infected in the first snapshot.
///
/// Snapshot times come from each snapshot; a snapshot without a time is
/// scored at its own estimated time and contributes no transition term.
pub fn snapshot_series_scores(
    g: &Graph,
    snaps: &[InfectionSnapshot],
    objective: Objective,
    alpha: Option<f64>,
    combine: Combine,
    cfg: &SingleConfig,
) -> Result<SnapshotSeriesResult> {
    if snaps.is_empty() {
        return Err(Error::param("at least one snapshot is required"));
    }
    let n = g.node_count();
    for s in snaps {
        s.require_nonempty(n)?;
    }
    check_monotone(snaps)?;
    let mut warnings = Vec::new();
    if let (_, Some(w)) = contracted_law(&cfg.law) {
        if snaps.len() > 1 {
            warnings.push(w);
        }
    }
    let candidates = snaps[0].infected().to_vec();
    let mut per_snapshot = Vec::with_capacity(snaps.len());
    for s in snaps {
        // score every snapshot on the first snapshot's candidates
        let restricted = restrict_candidates(g, s, &candidates, objective, alpha, cfg)?;
        per_snapshot.push(restricted);
    }
    let mut transition_terms = Vec::new();
    for w in snaps.windows(2) {
        if let (Some(ta), Some(tb)) = (w[0].time(), w[1].time()) {
            let a = alpha.unwrap_or(default_alpha(&w[1], n));
            transition_terms.push(transition_term(g, &w[0], &w[1], tb - ta, objective, a, cfg)?);
        }
    }

    let entries: Vec<(usize, f64, Option<f64>)> = candidates
        .iter()
        .map(|&v| {
            let scores: Vec<f64> = per_snapshot
                .iter()
                .map(|r| r.table.row(v).expect("candidate scored").score)
                .collect();
            let score = match combine {
                Combine::Average => scores.iter().sum::<f64>() / scores.len() as f64,
                Combine::ChainRule => scores[0] + transition_terms.iter().sum::<f64>(),
            };
            (v, score, per_snapshot[0].table.row(v).and_then(|r| r.t_used))
        })
        .collect();
    Ok(SnapshotSeriesResult {
        table: ScoreTable::from_scores(objective.method(), entries),
        per_snapshot,
        transition_terms,
        warnings,
    })
}

/// Single-snapshot scores of `snap` over a fixed candidate set.
fn restrict_candidates(
    g: &Graph,
    snap: &InfectionSnapshot,
    candidates: &[usize],
    objective: Objective,
    alpha: Option<f64>,
    cfg: &SingleConfig,
) -> Result<SingleResult> {
    let n = g.node_count();
    let a = alpha.unwrap_or(default_alpha(snap, n));
    let evidence = Evidence::from_snapshot(snap, n)?.with_candidates(candidates.to_vec());
    let scorer = single::CandidateScorer::new(g, candidates.to_vec(), cfg)?;
    match snap.time() {
        Some(t) if t > 0.0 => {
            let scores = scorer.scores(t, std::slice::from_ref(&evidence), objective, &[a]);
            let entries = candidates.iter().zip(scores).map(|(&v, s)| (v, s, Some(t))).collect();
            Ok(SingleResult {
                table: ScoreTable::from_scores(objective.method(), entries),
                estimate: single::TimeEstimate {
                    t,
                    method: single::TimeMethod::Known,
                    bins: 0,
                    t_max: 0.0,
                },
                alpha: (objective == Objective::Error).then_some(a),
                per_candidate_t: Vec::new(),
            })
        }
        _ => {
            let full = single::infer(g, std::slice::from_ref(snap), objective, None, Some(a), cfg)?;
            let t = full.estimate.t;
            let scores = scorer.scores(t, std::slice::from_ref(&evidence), objective, &[a]);
            let entries = candidates.iter().zip(scores).map(|(&v, s)| (v, s, Some(t))).collect();
            Ok(SingleResult {
                table: ScoreTable::from_scores(objective.method(), entries),
                ..full
            })
        }
    }
}

/// Two-snapshot scores; see [`snapshot_series_scores`].
pub fn two_snapshot_scores(
    g: &Graph,
    first: &InfectionSnapshot,
    second: &InfectionSnapshot,
    objective: Objective,
    alpha: Option<f64>,
    combine: Combine,
    cfg: &SingleConfig,
) -> Result<SnapshotSeriesResult> {
    snapshot_series_scores(g, &[first.clone(), second.clone()], objective, alpha, combine, cfg)
}
