//! Centrality baselines and rank combination.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{diameter, hop_distances, Graph, UNREACHABLE};
use crate::observation::InfectionSnapshot;
use crate::rank::{fractional_ranks, Method, ScoreRow, ScoreTable};

/// Penalty for an unreachable infected node: five times the diameter of the
/// whole graph (at least 1).
pub fn unreachable_penalty(g: &Graph) -> f64 {
    5.0 * f64::from(diameter(g).max(1))
}

/// Sum of hop distances from each infected candidate to every infected
/// node; lower is better.
pub fn distance_centrality_scores(g: &Graph, snap: &InfectionSnapshot) -> Result<ScoreTable> {
    snap.require_nonempty(g.node_count())?;
    let penalty = unreachable_penalty(g);
    Ok(distance_scores_with_penalty(g, snap, penalty))
}

/// [`distance_centrality_scores`] with a caller-supplied penalty, for
/// reusing a cached diameter.
pub fn distance_scores_with_penalty(g: &Graph, snap: &InfectionSnapshot, penalty: f64) -> ScoreTable {
    let entries = snap
        .infected()
        .par_iter()
        .map(|&i| {
            let dist = hop_distances(g, i);
            let score: f64 = snap
                .infected()
                .iter()
                .map(|&j| {
                    if dist[j] == UNREACHABLE {
                        penalty
                    } else {
                        f64::from(dist[j])
                    }
                })
                .sum();
            (i, score, None)
        })
        .collect();
    ScoreTable::from_scores(Method::Distance, entries)
}

/// Number of infected out-neighbors of each infected candidate; higher is
/// better.
pub fn degree_centrality_scores(g: &Graph, snap: &InfectionSnapshot) -> Result<ScoreTable> {
    snap.require_nonempty(g.node_count())?;
    let entries = snap
        .infected()
        .iter()
        .map(|&i| {
            let c = g.out_neighbors(i).filter(|&j| snap.contains(j)).count();
            (i, c as f64, None)
        })
        .collect();
    Ok(ScoreTable::from_scores(Method::Degree, entries))
}

/// Mean of each candidate's fractional ranks across tables, re-ranked
/// ascending. The score column holds the mean rank.
pub fn integrative_rank(tables: &[ScoreTable]) -> Result<ScoreTable> {
    if tables.len() < 2 {
        return Err(Error::param("rank combination needs at least two tables"));
    }
    let candidates = tables[0].candidates();
    if let Some(t) = tables.iter().find(|t| t.candidates() != candidates) {
        return Err(Error::param(format!(
            "{} table covers a different candidate set",
            t.method
        )));
    }
    let mut sums: BTreeMap<usize, f64> = candidates.iter().map(|&v| (v, 0.0)).collect();
    for t in tables {
        for r in t.rows() {
            *sums.get_mut(&r.node).expect("same candidates") += r.rank;
        }
    }
    let nodes: Vec<usize> = sums.keys().copied().collect();
    let means: Vec<f64> = sums.values().map(|s| s / tables.len() as f64).collect();
    let ranks = fractional_ranks(&means, false);
    let rows = nodes
        .into_iter()
        .zip(means)
        .zip(ranks)
        .map(|((node, score), rank)| ScoreRow {
            node,
            score,
            t_used: None,
            rank,
        })
        .collect();
    Ok(ScoreTable::from_rows(Method::Integrative, rows))
}
