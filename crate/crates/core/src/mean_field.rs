//! Expected scores under exact infection marginals.
//!
//! On a tree the SI infection time of `j` from a single source `s` is the
//! sum of the holding times along the unique path, so
//! `Pr[y_j(t) = 1] = F(d_sj, t)`. Feeding these marginals as fractional
//! evidence turns every score into its expectation over the SI process.
//! With several sources the marginals are combined as
//! `1 - Π_s (1 - F(d_sj, t))`.

use crate::error::{Error, Result};
use crate::graph::{hop_distances, Graph, UNREACHABLE};
use crate::kernel::ErlangTable;
use crate::observation::Evidence;

/// Complete rooted tree where every internal node has `branching` children
/// and leaves sit at depth `depth`. Nodes are numbered breadth first from
/// the root `0`.
pub fn regular_tree(branching: usize, depth: usize) -> Result<Graph> {
    if branching == 0 {
        return Err(Error::param("branching must be at least 1"));
    }
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut next_id = 1usize;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * branching);
        for &parent in &level {
            for _ in 0..branching {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        level = next;
    }
    Graph::unweighted(next_id, false, edges)
}

/// Tree where every internal node has degree `degree`: the root has
/// `degree` children and every other internal node `degree - 1`. Leaves sit
/// at depth `depth`.
pub fn regular_degree_tree(degree: usize, depth: usize) -> Result<Graph> {
    if degree < 2 {
        return Err(Error::param("degree must be at least 2"));
    }
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut next_id = 1usize;
    for d in 0..depth {
        let children = if d == 0 { degree } else { degree - 1 };
        let mut next = Vec::with_capacity(level.len() * children);
        for &parent in &level {
            for _ in 0..children {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        level = next;
    }
    Graph::unweighted(next_id, false, edges)
}

/// Path of `spine` nodes (ids `0..spine`) where every spine node carries
/// side branches that are complete `(degree - 1)`-ary trees of depth
/// `arm_depth`. Interior spine nodes get `degree - 2` branches and the two
/// ends `degree - 1`, so every node within `arm_depth` of the spine has
/// degree `degree`.
pub fn spine_tree(spine: usize, arm_depth: usize, degree: usize) -> Result<Graph> {
    if degree < 3 || spine < 2 {
        return Err(Error::param("spine trees need degree >= 3 and at least 2 spine nodes"));
    }
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
    let mut next_id = spine;
    for v in 0..spine {
        let branches = if v == 0 || v + 1 == spine { degree - 1 } else { degree - 2 };
        for _ in 0..branches {
            let mut level = vec![v];
            for d in 0..arm_depth {
                let children = if d == 0 { 1 } else { degree - 1 };
                let mut next = Vec::with_capacity(level.len() * children);
                for &parent in &level {
                    for _ in 0..children {
                        edges.push((parent, next_id));
                        next.push(next_id);
                        next_id += 1;
                    }
                }
                level = next;
            }
        }
    }
    Graph::unweighted(next_id, false, edges)
}

/// Depth of every node of a tree built by [`regular_tree`].
pub fn tree_depths(g: &Graph) -> Vec<u32> {
    hop_distances(g, 0)
}

/// `1 - Π_s (1 - F(d_sj, t))` for every node `j`, with unit-rate edges
/// scaled by `rate`.
pub fn si_marginals(g: &Graph, sources: &[usize], t: f64, rate: f64) -> Result<Vec<f64>> {
    let n = g.node_count();
    if sources.is_empty() {
        return Err(Error::param("at least one source is required"));
    }
    if let Some(&s) = sources.iter().find(|&&s| s >= n) {
        return Err(Error::NodeOutOfRange { id: s, n });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("time must be finite and non-negative"));
    }
    let table = ErlangTable::new(rate, t, n.max(1));
    let mut escape = vec![1.0f64; n];
    for &s in sources {
        for (j, d) in hop_distances(g, s).into_iter().enumerate() {
            if d != UNREACHABLE {
                escape[j] *= table.sf(d as usize);
            }
        }
    }
    Ok(escape.into_iter().map(|q| 1.0 - q).collect())
}

/// Marginals as evidence with every node a candidate.
pub fn expected_evidence(g: &Graph, sources: &[usize], t: f64, rate: f64) -> Result<Evidence> {
    Evidence::from_marginals(si_marginals(g, sources, t, rate)?)
}
