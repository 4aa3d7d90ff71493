//! Score tables and fractional ranking.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::Error;

/// Source-inference method that produced a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    NiMl,
    NiMe,
    NiMulti,
    Distance,
    Degree,
    Integrative,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::NiMl,
        Method::NiMe,
        Method::NiMulti,
        Method::Distance,
        Method::Degree,
        Method::Integrative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::NiMl => "ni-ml",
            Method::NiMe => "ni-me",
            Method::NiMulti => "ni-multi",
            Method::Distance => "distance",
            Method::Degree => "degree",
            Method::Integrative => "integrative",
        }
    }

    /// Whether larger scores rank first.
    pub fn higher_is_better(self) -> bool {
        matches!(self, Method::NiMl | Method::NiMulti | Method::Degree)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRow {
    pub node: usize,
    pub score: f64,
    /// Time parameter the score was computed at, if any.
    pub t_used: Option<f64>,
    /// 1-based rank; tied scores share the average of their positions.
    pub rank: f64,
}

/// Scores of candidate sources, sorted from best to worst.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    pub method: Method,
    rows: Vec<ScoreRow>,
}

const TIE_TOL: f64 = 1e-12;

fn tied(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_TOL * a.abs().max(b.abs())
}

/// Fractional ranks of `scores` (1 = best). Scores within a relative
/// `1e-12` of the first member of a run are treated as tied.
pub fn fractional_ranks(scores: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let c = scores[a].total_cmp(&scores[b]);
        if higher_is_better {
            c.reverse()
        } else {
            c
        }
    });
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let head = scores[order[i]];
        let mut j = i + 1;
        while j < order.len() && tied(head, scores[order[j]]) {
            j += 1;
        }
        // positions i+1 ..= j share their mean
        let r = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = r;
        }
        i = j;
    }
    ranks
}

impl ScoreTable {
    /// Ranks `(node, score, t_used)` entries by the method's orientation.
    pub fn from_scores(method: Method, entries: Vec<(usize, f64, Option<f64>)>) -> Self {
        let scores: Vec<f64> = entries.iter().map(|e| e.1).collect();
        let ranks = fractional_ranks(&scores, method.higher_is_better());
        let rows = entries
            .into_iter()
            .zip(ranks)
            .map(|((node, score, t_used), rank)| ScoreRow {
                node,
                score,
                t_used,
                rank,
            })
            .collect();
        Self::from_rows(method, rows)
    }

    /// Uses ranks as given.
    pub fn from_rows(method: Method, mut rows: Vec<ScoreRow>) -> Self {
        rows.sort_by(|a, b| a.rank.total_cmp(&b.rank).then(a.node.cmp(&b.node)));
        ScoreTable { method, rows }
    }

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Top row; ties resolve to the smallest node id.
    pub fn best(&self) -> Option<&ScoreRow> {
        self.rows.first()
    }

    pub fn row(&self, node: usize) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.node == node)
    }

    pub fn rank_of(&self, node: usize) -> Option<f64> {
        self.row(node).map(|r| r.rank)
    }

    /// Candidate ids in ascending order.
    pub fn candidates(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.rows.iter().map(|r| r.node).collect();
        c.sort_unstable();
        c
    }

    /// CSV with header `node,score,t_used,rank`. A missing `t_used` is an
    /// empty field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,score,t_used,rank\n");
        for r in &self.rows {
            let t = r.t_used.map(|t| t.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", r.node, r.score, t, r.rank);
        }
        out
    }
}
