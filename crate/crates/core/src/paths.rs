//! Edge-disjoint shortest paths from one source to every node.
//!
//! Paths are found iteratively per target: the first path is a shortest path
//! in the full graph, the `r`-th is a shortest path in the graph with the
//! edges of that target's first `r - 1` paths removed. Among equally short
//! paths one is drawn uniformly at random by counting shortest paths forward
//! and walking back from the target, choosing each predecessor with
//! probability proportional to its path count.
//!
//! The scheme is greedy, so for some graphs it finds fewer disjoint paths
//! than a flow-based method would.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Arc, Graph};
use crate::rng;

/// How edge lengths are measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PathMetric {
    /// Every edge has length 1; weights are ignored.
    #[default]
    Hops,
    /// Edge length is the reciprocal of its rate.
    InverseRate,
}

/// One selected path, stored as an index range into the profile's edge buffer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathEntry {
    pub hops: u32,
    /// Total length under the metric used to select the path.
    pub length: f64,
    start: u32,
}

/// Up to `k` edge-disjoint shortest paths from `source` to every node.
#[derive(Clone, Debug, PartialEq)]
pub struct PathLengthProfile {
    source: usize,
    k: usize,
    metric: PathMetric,
    offsets: Vec<u32>,
    entries: Vec<PathEntry>,
    edges: Vec<u32>,
}

impl PathLengthProfile {
    pub fn source(&self) -> usize {
        self.source
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> PathMetric {
        self.metric
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Paths to `target` in selection order. Empty when unreachable and for
    /// the source itself.
    pub fn paths(&self, target: usize) -> &[PathEntry] {
        let lo = self.offsets[target] as usize;
        let hi = self.offsets[target + 1] as usize;
        &self.entries[lo..hi]
    }

    /// Edge ids of a path, ordered from the source towards the target.
    pub fn path_edges(&self, entry: &PathEntry) -> &[u32] {
        let lo = entry.start as usize;
        &self.edges[lo..lo + entry.hops as usize]
    }

    /// Hop counts of the paths to `target`.
    pub fn hop_lengths(&self, target: usize) -> Vec<u32> {
        self.paths(target).iter().map(|p| p.hops).collect()
    }

    /// Shortest-path length to `target`, if reachable.
    pub fn distance(&self, target: usize) -> Option<f64> {
        self.paths(target).first().map(|p| p.length)
    }
}

/// Computes the profile of `source` with at most `k` paths per target.
pub fn k_disjoint_shortest_paths(
    g: &Graph,
    source: usize,
    k: usize,
    metric: PathMetric,
    seed: u64,
) -> Result<PathLengthProfile> {
    check_args(g, source, k)?;
    let mut rng = rng::stream(seed, &[rng::tag("paths"), source as u64]);
    Ok(Searcher::new(g, metric).profile(source, k, &mut rng))
}

/// Profiles for several sources, computed in parallel. Each source uses its
/// own random stream so the result does not depend on scheduling.
pub fn all_pairs_profiles(
    g: &Graph,
    sources: &[usize],
    k: usize,
    metric: PathMetric,
    seed: u64,
) -> Result<Vec<PathLengthProfile>> {
    for &s in sources {
        check_args(g, s, k)?;
    }
    Ok(sources
        .par_iter()
        .map_init(
            || Searcher::new(g, metric),
            |searcher, &s| {
                let mut rng = rng::stream(seed, &[rng::tag("paths"), s as u64]);
                searcher.profile(s, k, &mut rng)
            },
        )
        .collect())
}

fn check_args(g: &Graph, source: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if source >= g.node_count() {
        return Err(Error::NodeOutOfRange {
            id: source,
            n: g.node_count(),
        });
    }
    Ok(())
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: u32,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties by node id for determinism
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable search state. Generation stamps avoid clearing per search.
struct Searcher<'g> {
    g: &'g Graph,
    metric: PathMetric,
    dist: Vec<f64>,
    sigma: Vec<f64>,
    seen: Vec<u32>,
    settled: Vec<u32>,
    stamp: u32,
    removed: Vec<u32>,
    removed_stamp: u32,
    queue: VecDeque<u32>,
    heap: BinaryHeap<HeapItem>,
    preds: Vec<(u32, f64)>,
}

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

impl<'g> Searcher<'g> {
    fn new(g: &'g Graph, metric: PathMetric) -> Self {
        let n = g.node_count();
        Searcher {
            g,
            metric,
            dist: vec![0.0; n],
            sigma: vec![0.0; n],
            seen: vec![0; n],
            settled: vec![0; n],
            stamp: 0,
            removed: vec![0; g.edge_count()],
            removed_stamp: 0,
            queue: VecDeque::new(),
            heap: BinaryHeap::new(),
            preds: Vec::new(),
        }
    }

    fn arc_len(&self, a: &Arc) -> f64 {
        match self.metric {
            PathMetric::Hops => 1.0,
            PathMetric::InverseRate => 1.0 / self.g.weight(a.edge),
        }
    }

    fn usable(&self, a: &Arc) -> bool {
        self.removed[a.edge as usize] != self.removed_stamp
    }

    fn next_stamp(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.fill(0);
            self.settled.fill(0);
            self.stamp = 1;
        }
    }

    fn next_removed_stamp(&mut self) {
        self.removed_stamp = self.removed_stamp.wrapping_add(1);
        if self.removed_stamp == 0 {
            self.removed.fill(0);
            self.removed_stamp = 1;
        }
    }

    fn is_settled(&self, v: usize) -> bool {
        self.settled[v] == self.stamp
    }

    /// Forward search with path counting. With `target` set the search stops
    /// once the target's count is final. Returns whether the target (or any
    /// node, without a target) was reached.
    fn search(&mut self, source: usize, target: Option<usize>) -> bool {
        self.next_stamp();
        let s = source;
        self.dist[s] = 0.0;
        self.sigma[s] = 1.0;
        self.seen[s] = self.stamp;
        match self.metric {
            PathMetric::Hops => self.bfs(s, target),
            PathMetric::InverseRate => self.dijkstra(s, target),
        }
        target.is_none_or(|t| self.is_settled(t))
    }

    fn bfs(&mut self, s: usize, target: Option<usize>) {
        let g = self.g;
        self.queue.clear();
        self.queue.push_back(s as u32);
        while let Some(u) = self.queue.pop_front() {
            let u = u as usize;
            if let Some(t) = target {
                // the target's layer is complete once we reach it
                if self.seen[t] == self.stamp && self.dist[u] >= self.dist[t] {
                    self.settled[t] = self.stamp;
                    return;
                }
            }
            self.settled[u] = self.stamp;
            let next = self.dist[u] + 1.0;
            for a in g.out_arcs(u) {
                if !self.usable(a) {
                    continue;
                }
                let v = a.to as usize;
                if self.seen[v] != self.stamp {
                    self.seen[v] = self.stamp;
                    self.dist[v] = next;
                    self.sigma[v] = self.sigma[u];
                    self.queue.push_back(a.to);
                } else if self.dist[v] == next {
                    self.sigma[v] += self.sigma[u];
                }
            }
        }
        if let Some(t) = target {
            if self.seen[t] == self.stamp {
                self.settled[t] = self.stamp;
            }
        }
    }

    fn dijkstra(&mut self, s: usize, target: Option<usize>) {
        let g = self.g;
        self.heap.clear();
        self.heap.push(HeapItem {
            dist: 0.0,
            node: s as u32,
        });
        while let Some(HeapItem { dist, node }) = self.heap.pop() {
            let u = node as usize;
            if self.is_settled(u) || dist > self.dist[u] {
                continue;
            }
            self.settled[u] = self.stamp;
            if target == Some(u) {
                return;
            }
            for a in g.out_arcs(u) {
                if !self.usable(a) {
                    continue;
                }
                let v = a.to as usize;
                if self.is_settled(v) {
                    continue;
                }
                let nd = dist + self.arc_len(a);
                if self.seen[v] != self.stamp {
                    self.seen[v] = self.stamp;
                    self.dist[v] = nd;
                    self.sigma[v] = self.sigma[u];
                    self.heap.push(HeapItem { dist: nd, node: a.to });
                } else if same_length(nd, self.dist[v]) {
                    self.sigma[v] += self.sigma[u];
                } else if nd < self.dist[v] {
                    self.dist[v] = nd;
                    self.sigma[v] = self.sigma[u];
                    self.heap.push(HeapItem { dist: nd, node: a.to });
                }
            }
        }
    }

    /// Draws a uniformly random shortest path to `target` from the current
    /// search state and appends its edge ids (source first) to `out`.
    fn sample_path(&mut self, source: usize, target: usize, rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
        let g = self.g;
        let begin = out.len();
        let mut v = target;
        while v != source {
            self.preds.clear();
            let mut total = 0.0;
            for a in g.in_arcs(v) {
                if !self.usable(a) {
                    continue;
                }
                let u = a.to as usize;
                if self.settled[u] != self.stamp || u == v {
                    continue;
                }
                let len = match self.metric {
                    PathMetric::Hops => 1.0,
                    PathMetric::InverseRate => 1.0 / g.weight(a.edge),
                };
                let ok = match self.metric {
                    PathMetric::Hops => self.dist[u] + 1.0 == self.dist[v],
                    PathMetric::InverseRate => same_length(self.dist[u] + len, self.dist[v]),
                };
                if ok {
                    total += self.sigma[u];
                    self.preds.push((a.edge, total));
                }
            }
            debug_assert!(!self.preds.is_empty(), "no predecessor on a shortest path");
            let pick = if self.preds.len() == 1 {
                0
            } else {
                let x = rng.random::<f64>() * total;
                self.preds
                    .iter()
                    .position(|&(_, c)| x < c)
                    .unwrap_or(self.preds.len() - 1)
            };
            let edge = self.preds[pick].0;
            out.push(edge);
            let e = g.edge(edge);
            v = if e.dst == v { e.src } else { e.dst };
        }
        out[begin..].reverse();
    }

    fn remaining_arcs(&self, arcs: &[Arc]) -> bool {
        arcs.iter().any(|a| self.usable(a))
    }

    fn profile(&mut self, source: usize, k: usize, rng: &mut ChaCha8Rng) -> PathLengthProfile {
        let g = self.g;
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut entries = Vec::new();
        let mut edges: Vec<u32> = Vec::new();

        // Round one shares a single full search across all targets.
        self.next_removed_stamp();
        self.search(source, None);
        let mut round_one = self.stamp;
        let reached: Vec<bool> = (0..n).map(|v| self.settled[v] == round_one).collect();
        let first_dist: Vec<f64> = self.dist.clone();
        let first_sigma: Vec<f64> = self.sigma.clone();

        offsets.push(0u32);
        for target in 0..n {
            if target != source && reached[target] {
                if self.stamp != round_one {
                    // a later round overwrote the shared search state
                    self.next_stamp();
                    for v in (0..n).filter(|&v| reached[v]) {
                        self.settled[v] = self.stamp;
                        self.seen[v] = self.stamp;
                    }
                    self.dist.copy_from_slice(&first_dist);
                    self.sigma.copy_from_slice(&first_sigma);
                    round_one = self.stamp;
                }
                self.next_removed_stamp();
                self.add_path(source, target, rng, &mut entries, &mut edges);
                for _ in 1..k {
                    // each path uses one arc out of the source and one into the target
                    if !self.remaining_arcs(g.out_arcs(source)) || !self.remaining_arcs(g.in_arcs(target)) {
                        break;
                    }
                    if !self.search(source, Some(target)) {
                        break;
                    }
                    self.add_path(source, target, rng, &mut entries, &mut edges);
                }
            }
            offsets.push(entries.len() as u32);
        }

        PathLengthProfile {
            source,
            k,
            metric: self.metric,
            offsets,
            entries,
            edges,
        }
    }

    fn add_path(
        &mut self,
        source: usize,
        target: usize,
        rng: &mut ChaCha8Rng,
        entries: &mut Vec<PathEntry>,
        edges: &mut Vec<u32>,
    ) {
        let start = edges.len();
        self.sample_path(source, target, rng, edges);
        let hops = (edges.len() - start) as u32;
        let length = match self.metric {
            PathMetric::Hops => f64::from(hops),
            PathMetric::InverseRate => edges[start..].iter().map(|&e| 1.0 / self.g.weight(e)).sum(),
        };
        for &e in &edges[start..] {
            self.removed[e as usize] = self.removed_stamp;
        }
        entries.push(PathEntry {
            hops,
            length,
            start: start as u32,
        });
    }
}
