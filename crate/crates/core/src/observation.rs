//! Observed infection states.

use crate::error::{Error, Result};

/// Infected node set observed at one time point.
///
/// The infected list is kept sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct InfectionSnapshot {
    time: Option<f64>,
    infected: Vec<usize>,
}

impl InfectionSnapshot {
    pub fn new(time: Option<f64>, mut infected: Vec<usize>) -> Self {
        infected.sort_unstable();
        infected.dedup();
        InfectionSnapshot { time, infected }
    }

    /// Observation time, `None` when unknown.
    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn with_time(mut self, time: Option<f64>) -> Self {
        self.time = time;
        self
    }

    pub fn infected(&self) -> &[usize] {
        &self.infected
    }

    pub fn len(&self) -> usize {
        self.infected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infected.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.infected.binary_search(&v).is_ok()
    }

    /// Indicator vector of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.infected {
            mask[v] = true;
        }
        mask
    }

    /// Checks that every id is below `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self.infected.last() {
            Some(&id) if id >= n => Err(Error::NodeOutOfRange { id, n }),
            _ => Ok(()),
        }
    }

    /// Errors if the snapshot is empty or references ids `>= n`.
    pub fn require_nonempty(&self, n: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyInfectedSet);
        }
        self.validate(n)
    }

    pub fn is_subset_of(&self, other: &InfectionSnapshot) -> bool {
        self.infected.iter().all(|&v| other.contains(v))
    }
}

/// Soft observation used by the scoring routines: a per-node weight
/// `y_j ∈ [0, 1]` and the list of candidate sources.
///
/// A binary snapshot has weights in `{0, 1}` and its infected nodes as
/// candidates. Fractional weights let the same objectives be evaluated in
/// expectation, for example against exact infection marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    pub weights: Vec<f64>,
    pub candidates: Vec<usize>,
}

impl Evidence {
    pub fn from_snapshot(snap: &InfectionSnapshot, n: usize) -> Result<Self> {
        snap.require_nonempty(n)?;
        let mut weights = vec![0.0; n];
        for &v in snap.infected() {
            weights[v] = 1.0;
        }
        Ok(Evidence {
            weights,
            candidates: snap.infected().to_vec(),
        })
    }

    /// Evidence from infection marginals; every node is a candidate.
    pub fn from_marginals(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::param(format!("marginal {w} outside [0, 1]")));
        }
        let candidates = (0..weights.len()).collect();
        Ok(Evidence { weights, candidates })
    }

    pub fn with_candidates(mut self, mut candidates: Vec<usize>) -> Self {
        candidates.sort_unstable();
        candidates.dedup();
        self.candidates = candidates;
        self
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    /// Sum of weights, the (expected) number of infected nodes.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}
