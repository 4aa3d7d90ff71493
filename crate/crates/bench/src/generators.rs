//! Synthetic networks used by the experiments.

use rand::Rng;

use infusion::graph::Graph;
use infusion::{Error, Result};

/// A generated graph with an optional designated center node.
#[derive(Clone, Debug)]
pub struct Network {
    pub graph: Graph,
    pub center: Option<usize>,
}

/// G(n, p): each of the `n(n-1)/2` pairs is an edge independently with
/// probability `p`. Pairs are visited with geometric skips, so the cost is
/// proportional to the number of edges.
pub fn gen_erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for u in 0..v {
                edges.push((u, v));
            }
        }
    } else if p > 0.0 {
        let log_q = (-p).ln_1p();
        // walk the lower triangle (v, u) with u < v in row-major order
        let (mut v, mut u) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.random();
            let skip = ((-r).ln_1p() / log_q).floor() as i64;
            u += 1 + skip;
            while v < n && u >= v as i64 {
                u -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((u as usize, v));
            }
        }
    }
    Graph::unweighted(n, false, edges)
}

/// Preferential attachment: a 5-cycle seed, then each new node links to
/// `theta` distinct existing nodes chosen with probability proportional to
/// their degree.
pub fn gen_power_law<R: Rng>(n: usize, theta: usize, rng: &mut R) -> Result<Graph> {
    const SEED: usize = 5;
    if n < SEED {
        return Err(Error::param(format!("power-law graphs need at least {SEED} nodes")));
    }
    if theta == 0 || theta > SEED {
        return Err(Error::param(format!("theta must lie in 1..={SEED}, got {theta}")));
    }
    let mut edges: Vec<(usize, usize)> = (0..SEED).map(|i| (i, (i + 1) % SEED)).collect();
    // every edge endpoint once, so a uniform pick is degree-proportional
    let mut ends: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut chosen = Vec::with_capacity(theta);
    for v in SEED..n {
        chosen.clear();
        while chosen.len() < theta {
            let u = ends[rng.random_range(0..ends.len())];
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for &u in &chosen {
            edges.push((u, v));
            ends.push(u);
            ends.push(v);
        }
    }
    Graph::unweighted(n, false, edges)
}

/// Square lattice with `ceil(sqrt(n))` columns filled row by row and
/// trimmed to `n` nodes. The center is the node nearest the middle of the
/// filled rows.
pub fn gen_grid(n: usize) -> Result<Network> {
    if n == 0 {
        return Err(Error::param("grid needs at least one node"));
    }
    let cols = (n as f64).sqrt().ceil() as usize;
    let mut edges = Vec::new();
    for v in 0..n {
        let (r, c) = (v / cols, v % cols);
        if c + 1 < cols && v + 1 < n {
            edges.push((v, v + 1));
        }
        if v + cols < n {
            edges.push((v, v + cols));
        }
        let _ = r;
    }
    let full_rows = (n / cols).max(1);
    let center = ((full_rows - 1) / 2) * cols + (cols - 1) / 2;
    Ok(Network {
        graph: Graph::unweighted(n, false, edges)?,
        center: Some(center.min(n - 1)),
    })
}

/// Center node `0` with six branches of `b = floor((n - 1) / 6)` nodes each.
///
/// The three dense branches form one lattice of nine rows (three stacked
/// strips of three rows) and `ceil(3b / 9)` columns, trimmed to `3b` nodes;
/// the center attaches to the middle row of each strip in the first column.
/// The three sparse branches are complete binary trees (heap order) with
/// `b` nodes, attached at their roots. The graph has `1 + 6b` nodes.
pub fn gen_asym_grid(n: usize) -> Result<Network> {
    let b = (n.saturating_sub(1)) / 6;
    if b < 3 {
        return Err(Error::param("asymmetric grid needs at least 19 nodes"));
    }
    const ROWS: usize = 9;
    let dense = 3 * b;
    let mut edges = Vec::new();
    // lattice ids 1..=dense in column-major order
    let id = |c: usize, r: usize| 1 + c * ROWS + r;
    for k in 0..dense {
        let (c, r) = (k / ROWS, k % ROWS);
        if r + 1 < ROWS && k + 1 < dense {
            edges.push((id(c, r), id(c, r + 1)));
        }
        if k + ROWS < dense {
            edges.push((id(c, r), id(c + 1, r)));
        }
    }
    for strip in 0..3 {
        edges.push((0, id(0, 3 * strip + 1)));
    }
    let mut next = 1 + dense;
    for _ in 0..3 {
        let root = next;
        edges.push((0, root));
        for k in 1..b {
            edges.push((root + (k - 1) / 2, root + k));
        }
        next += b;
    }
    Ok(Network {
        graph: Graph::unweighted(next, false, edges)?,
        center: Some(0),
    })
}

/// Tree where every internal node has degree `degree`, rooted at the
/// center `0`.
pub fn gen_regular_tree(degree: usize, depth: usize) -> Result<Network> {
    Ok(Network {
        graph: infusion::mean_field::regular_degree_tree(degree, depth)?,
        center: Some(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use infusion::graph::{connected_components, hop_distances};
    use infusion::kernel::{DiffusionKernel, KernelLaw};
    use infusion::rng;

    #[test]
    fn er_extremes() {
        let mut r = rng::stream(1, &[]);
        assert_eq!(gen_erdos_renyi(20, 0.0, &mut r).unwrap().edge_count(), 0);
        assert_eq!(gen_erdos_renyi(20, 1.0, &mut r).unwrap().edge_count(), 190);
        assert!(gen_erdos_renyi(20, 1.5, &mut r).is_err());
    }

    #[test]
    fn er_mean_edge_count() {
        // Binomial(31125, 0.01): mean 311.25, sd of the mean of 100 draws 1.76
        let mut total = 0usize;
        for i in 0..100u64 {
            let mut r = rng::stream(i, &[7]);
            total += gen_erdos_renyi(250, 0.01, &mut r).unwrap().edge_count();
        }
        let mean = total as f64 / 100.0;
        let sd = (31125.0f64 * 0.01 * 0.99 / 100.0).sqrt();
        assert!((mean - 311.25).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn er_pairs_are_uniform() {
        // every pair of a 5-node graph should appear with frequency near p
        let mut counts = [[0usize; 5]; 5];
        for i in 0..4000u64 {
            let mut r = rng::stream(i, &[3]);
            for e in gen_erdos_renyi(5, 0.3, &mut r).unwrap().edges() {
                counts[e.src as usize][e.dst as usize] += 1;
            }
        }
        let sd = (4000.0f64 * 0.3 * 0.7).sqrt();
        for v in 1..5 {
            for u in 0..v {
                let c = counts[u][v] as f64;
                assert!((c - 1200.0).abs() < 4.0 * sd, "pair {u},{v}: {c}");
            }
        }
    }

    #[test]
    fn power_law_counts() {
        let mut r = rng::stream(2, &[]);
        let g = gen_power_law(250, 2, &mut r).unwrap();
        assert_eq!(g.edge_count(), 5 + 2 * 245);
        let t = gen_power_law(60, 1, &mut r).unwrap();
        assert_eq!(t.edge_count(), 5 + 55);
        assert_eq!(connected_components(&t).len(), 1);
    }

    #[test]
    fn power_law_tail_is_heavier_than_er() {
        fn gini(g: &Graph) -> f64 {
            let mut d: Vec<f64> = (0..g.node_count()).map(|v| g.out_degree(v) as f64).collect();
            d.sort_by(f64::total_cmp);
            let n = d.len() as f64;
            let sum: f64 = d.iter().sum();
            let weighted: f64 = d.iter().enumerate().map(|(i, x)| (i as f64 + 1.0) * x).sum();
            2.0 * weighted / (n * sum) - (n + 1.0) / n
        }
        let (mut pl, mut er) = (0.0, 0.0);
        for i in 0..100u64 {
            let mut r = rng::stream(i, &[11]);
            let g = gen_power_law(250, 2, &mut r).unwrap();
            // matched density: same expected edge count
            let p = g.edge_count() as f64 / (250.0 * 249.0 / 2.0);
            pl += gini(&g);
            er += gini(&gen_erdos_renyi(250, p, &mut r).unwrap());
        }
        assert!(pl > er, "{pl} {er}");
    }

    #[test]
    fn grid_shapes() {
        let four = gen_grid(4).unwrap();
        assert_eq!(four.graph.edge_count(), 4);
        assert!((0..4).all(|v| four.graph.out_degree(v) == 2));
        let g = gen_grid(250).unwrap();
        // 16 columns: 15 full rows and 10 nodes in the last
        let horizontal = 15 * 15 + 9;
        let vertical = 250 - 16;
        assert_eq!(g.graph.edge_count(), horizontal + vertical);
        let c = g.center.unwrap();
        assert_eq!(g.graph.out_degree(c), 4);
        assert_eq!(c, 7 * 16 + 7);
    }

    #[test]
    fn asym_grid_structure() {
        let net = gen_asym_grid(250).unwrap();
        let g = &net.graph;
        assert_eq!(g.node_count(), 1 + 6 * 41);
        assert_eq!(g.out_degree(0), 6);
        let kernel = DiffusionKernel::new(g, KernelLaw::default(), 10, 0).unwrap();
        let profile = kernel.profile(0).unwrap();
        for v in 1..=123 {
            assert!(profile.paths(v).len() >= 2, "dense node {v}");
        }
        for v in 124..g.node_count() {
            assert_eq!(profile.paths(v).len(), 1, "sparse node {v}");
        }
        assert!(hop_distances(g, 0).iter().all(|&d| d != infusion::graph::UNREACHABLE));
    }
}
