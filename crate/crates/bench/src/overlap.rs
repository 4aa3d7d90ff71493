//! Frequency of overlapping shortest paths in random graphs.

use std::collections::VecDeque;

use rand::Rng;

use infusion::graph::{Graph, UNREACHABLE};
use infusion::rng;
use infusion::{Error, Result};

use crate::generators::gen_erdos_renyi;

/// Whether two distinct shortest `u`-`v` paths share an edge.
///
/// The number of shortest paths through a shortest-path DAG edge `a -> b`
/// is `σ_u(a) · σ_v(b)`; an edge carried by two or more of them is shared.
pub fn has_overlapping_shortest_paths(g: &Graph, u: usize, v: usize) -> bool {
    let (du, su) = bfs_counts(g, u);
    if du[v] == UNREACHABLE || u == v {
        return false;
    }
    let (dv, sv) = bfs_counts(g, v);
    let total = du[v];
    for a in 0..g.node_count() {
        if du[a] == UNREACHABLE || dv[a] == UNREACHABLE || du[a] + dv[a] != total {
            continue;
        }
        for b in g.out_neighbors(a) {
            if du[b] == du[a] + 1 && dv[b] + du[b] == total && su[a] * sv[b] >= 2.0 {
                return true;
            }
        }
    }
    false
}

/// Hop distances and shortest-path counts (as floats, so they saturate
/// gracefully instead of overflowing).
fn bfs_counts(g: &Graph, s: usize) -> (Vec<u32>, Vec<f64>) {
    let n = g.node_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut sigma = vec![0.0; n];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    while let Some(a) = queue.pop_front() {
        for b in g.out_neighbors(a) {
            if dist[b] == UNREACHABLE {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
            if dist[b] == dist[a] + 1 {
                sigma[b] += sigma[a];
            }
        }
    }
    (dist, sigma)
}

const PAIR_ATTEMPTS: usize = 1000;

/// Fraction of trials in which a uniformly chosen connected pair of a fresh
/// G(n, p) has overlapping shortest paths. A graph without a connected pair
/// after many attempts is replaced.
pub fn overlap_frequency(n: usize, p: f64, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    if n < 2 {
        return Err(Error::param("overlap needs at least two nodes"));
    }
    let mut hits = 0usize;
    for trial in 0..trials {
        let mut r = rng::stream(seed, &[rng::tag("overlap"), trial as u64]);
        'graph: loop {
            let g = gen_erdos_renyi(n, p, &mut r)?;
            if g.edge_count() == 0 {
                continue;
            }
            for _ in 0..PAIR_ATTEMPTS {
                let u = r.random_range(0..n);
                let v = r.random_range(0..n);
                if u == v || !connected(&g, u, v) {
                    continue;
                }
                if has_overlapping_shortest_paths(&g, u, v) {
                    hits += 1;
                }
                break 'graph;
            }
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Same measurement over every connected pair of a fixed graph.
pub fn overlap_fraction_of_graph(g: &Graph) -> f64 {
    let n = g.node_count();
    let (mut pairs, mut hits) = (0usize, 0usize);
    for u in 0..n {
        for v in u + 1..n {
            if connected(g, u, v) {
                pairs += 1;
                hits += usize::from(has_overlapping_shortest_paths(g, u, v));
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        hits as f64 / pairs as f64
    }
}

fn connected(g: &Graph, u: usize, v: usize) -> bool {
    infusion::graph::hop_distances(g, u)[v] != UNREACHABLE
}
