//! Continuous-time SI simulation.
//!
//! Each edge `(i, j)` carries an independent exponential holding time with
//! rate `rate * w(i, j)`. A node's infection time is the earliest arrival
//! over all paths from the sources, which is a shortest-path computation
//! over the sampled holding times. Holding times are drawn lazily in
//! settlement order, so scaling every rate by `c` divides every infection
//! time by exactly `c` for the same seed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::observation::InfectionSnapshot;
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub sources: Vec<usize>,
    /// Snapshot times, strictly increasing and non-negative.
    pub times: Vec<f64>,
    /// Multiplier applied to every edge weight.
    pub rate: f64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(sources: Vec<usize>, times: Vec<f64>, seed: u64) -> Self {
        SimulationConfig {
            sources,
            times,
            rate: 1.0,
            seed,
        }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::param("at least one source is required"));
        }
        if let Some(&s) = self.sources.iter().find(|&&s| s >= g.node_count()) {
            return Err(Error::NodeOutOfRange {
                id: s,
                n: g.node_count(),
            });
        }
        if self.times.is_empty() {
            return Err(Error::param("at least one snapshot time is required"));
        }
        if self.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::param("snapshot times must be finite and non-negative"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("snapshot times must be strictly increasing"));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::param("rate must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(PartialEq)]
struct Event {
    time: f64,
    node: u32,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Infection times of every node (`f64::INFINITY` when not infected by
/// `horizon`). Nodes infected after `horizon` may be reported as infinite.
pub fn infection_times<R: Rng>(
    g: &Graph,
    sources: &[usize],
    rate: f64,
    horizon: f64,
    rng: &mut R,
) -> Vec<f64> {
    let n = g.node_count();
    let mut time = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        time[s] = 0.0;
        heap.push(Event { time: 0.0, node: s as u32 });
    }
    while let Some(Event { time: t, node }) = heap.pop() {
        let u = node as usize;
        if done[u] {
            continue;
        }
        if t > horizon {
            time[u] = f64::INFINITY;
            break;
        }
        done[u] = true;
        for a in g.out_arcs(u) {
            let v = a.to as usize;
            if done[v] {
                continue;
            }
            let u01: f64 = rng.random();
            let hold = -(-u01).ln_1p() / (rate * g.weight(a.edge));
            let arrival = t + hold;
            if arrival < time[v] {
                time[v] = arrival;
                heap.push(Event { time: arrival, node: a.to });
            }
        }
    }
    for (v, t) in time.iter_mut().enumerate() {
        if !done[v] {
            *t = f64::INFINITY;
        }
    }
    time
}

/// One SI realization observed at every configured time.
pub fn simulate(g: &Graph, cfg: &SimulationConfig) -> Result<Vec<InfectionSnapshot>> {
    cfg.validate(g)?;
    Ok(run(g, cfg, cfg.seed))
}

fn run(g: &Graph, cfg: &SimulationConfig, seed: u64) -> Vec<InfectionSnapshot> {
    let mut rng = rng::stream(seed, &[rng::tag("simulate")]);
    let horizon = *cfg.times.last().expect("validated");
    let tau = infection_times(g, &cfg.sources, cfg.rate, horizon, &mut rng);
    snapshots_from_times(&tau, &cfg.times)
}

/// Snapshots `{i : τ_i <= t}` for each time.
pub fn snapshots_from_times(tau: &[f64], times: &[f64]) -> Vec<InfectionSnapshot> {
    times
        .iter()
        .map(|&t| {
            let infected = (0..tau.len()).filter(|&v| tau[v] <= t).collect();
            InfectionSnapshot::new(Some(t), infected)
        })
        .collect()
}

/// Seed used for run `index` of a batch.
pub fn run_seed(seed: u64, index: usize) -> u64 {
    rng::derive_seed(seed, &[rng::tag("run"), index as u64])
}

/// Independent runs; run `r` behaves like [`simulate`] with seed
/// `run_seed(cfg.seed, r)`.
pub fn batch_simulate(
    g: &Graph,
    cfg: &SimulationConfig,
    runs: usize,
) -> Result<Vec<Vec<InfectionSnapshot>>> {
    cfg.validate(g)?;
    Ok((0..runs)
        .into_par_iter()
        .map(|r| run(g, cfg, run_seed(cfg.seed, r)))
        .collect())
}
