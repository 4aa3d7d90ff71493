//! Property-based invariants.

use proptest::prelude::*;

use infusion::baselines::{degree_centrality_scores, distance_centrality_scores};
use infusion::contraction::contract;
use infusion::graph::{connected_components, Graph};
use infusion::kernel::{DiffusionKernel, KernelLaw, P_CAP, P_FLOOR};
use infusion::observation::InfectionSnapshot;
use infusion::rank::fractional_ranks;
use infusion::rng;
use infusion::simulate::{simulate, SimulationConfig};
use infusion::single::{ni_me_scores, ni_ml_scores, weighted_hamming, SingleConfig};

/// Connected undirected graph: a random tree plus extra edges.
fn connected_graph() -> impl Strategy<Value = Graph> {
    (3usize..14)
        .prop_flat_map(|n| {
            let parents = (1..n).map(|v| 0..v).collect::<Vec<_>>();
            let extra = proptest::collection::vec((0..n, 0..n), 0..n);
            (Just(n), parents, extra)
        })
        .prop_map(|(n, parents, extra)| {
            let mut pairs: Vec<(usize, usize)> = parents.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
            for (a, b) in extra {
                let (a, b) = (a.min(b), a.max(b));
                if a != b && !pairs.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)) {
                    pairs.push((a, b));
                }
            }
            Graph::unweighted(n, false, pairs).unwrap()
        })
}

fn permuted(g: &Graph, perm: &[usize]) -> Graph {
    Graph::unweighted(
        g.node_count(),
        false,
        g.edges().iter().map(|e| (perm[e.src as usize], perm[e.dst as usize])),
    )
    .unwrap()
}

fn infected_prefix(g: &Graph, count: usize) -> InfectionSnapshot {
    // a connected infected set grown breadth first from node 0
    let d = infusion::graph::hop_distances(g, 0);
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| (d[v], v));
    InfectionSnapshot::new(None, order[..count].to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scores_are_relabeling_equivariant(
        g in connected_graph(),
        shuffle_seed in any::<u64>(),
        frac in 0.2f64..0.9,
        t in 0.2f64..4.0,
    ) {
        let n = g.node_count();
        let count = ((n as f64 * frac) as usize).clamp(1, n);
        let snap = infected_prefix(&g, count);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut r = rng::stream(shuffle_seed, &[]);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut r);
        let h = permuted(&g, &perm);
        let hsnap = InfectionSnapshot::new(None, snap.infected().iter().map(|&v| perm[v]).collect());
        let cfg = SingleConfig::default();
        let a = ni_ml_scores(&g, &snap, t, &cfg).unwrap();
        let b = ni_ml_scores(&h, &hsnap, t, &cfg).unwrap();
        let c = ni_me_scores(&g, &snap, t, 0.3, &cfg).unwrap();
        let d = ni_me_scores(&h, &hsnap, t, 0.3, &cfg).unwrap();
        let e = distance_centrality_scores(&g, &snap).unwrap();
        let f = distance_centrality_scores(&h, &hsnap).unwrap();
        let x = degree_centrality_scores(&g, &snap).unwrap();
        let y = degree_centrality_scores(&h, &hsnap).unwrap();
        for &v in snap.infected() {
            let w = perm[v];
            prop_assert!((a.row(v).unwrap().score - b.row(w).unwrap().score).abs() < 1e-9);
            prop_assert!((c.row(v).unwrap().score - d.row(w).unwrap().score).abs() < 1e-9);
            prop_assert_eq!(e.row(v).unwrap().score, f.row(w).unwrap().score);
            prop_assert_eq!(x.row(v).unwrap().score, y.row(w).unwrap().score);
        }
    }

    #[test]
    fn kernel_is_bounded_and_grows_with_time(
        g in connected_graph(),
        k in 1usize..4,
        t in 0.05f64..6.0,
    ) {
        let kernel = DiffusionKernel::new(&g, KernelLaw::default(), k, 0).unwrap();
        let early = kernel.row(0, t).unwrap();
        let late = kernel.row(0, 1.5 * t).unwrap();
        for j in 0..g.node_count() {
            let (p, q) = (early.probs[j].p, late.probs[j].p);
            prop_assert!((P_FLOOR..=P_CAP).contains(&p));
            prop_assert!(q >= p);
            prop_assert!((early.probs[j].p + early.probs[j].q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn more_paths_never_lower_probability(g in connected_graph(), t in 0.1f64..4.0) {
        // extra disjoint paths multiply in more escape factors below one
        let one = DiffusionKernel::new(&g, KernelLaw::default(), 1, 0).unwrap().row(0, t).unwrap();
        let three = DiffusionKernel::new(&g, KernelLaw::default(), 3, 0).unwrap().row(0, t).unwrap();
        for j in 0..g.node_count() {
            prop_assert!(three.p(j) >= one.p(j) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn snapshots_are_nested_and_contain_sources(g in connected_graph(), seed in any::<u64>()) {
        let cfg = SimulationConfig::new(vec![0], vec![0.3, 1.0, 2.5], seed);
        let snaps = simulate(&g, &cfg).unwrap();
        prop_assert!(snaps[0].contains(0));
        prop_assert!(snaps[0].is_subset_of(&snaps[1]));
        prop_assert!(snaps[1].is_subset_of(&snaps[2]));
    }

    #[test]
    fn contraction_conserves_weight(
        g in connected_graph(),
        weights_seed in any::<u64>(),
        count in 1usize..6,
    ) {
        // dyadic weights keep every sum exact
        let mut r = rng::stream(weights_seed, &[]);
        let w = Graph::from_edges(
            g.node_count(),
            false,
            g.edges().iter().map(|e| {
                let k: u32 = rand::Rng::random_range(&mut r, 1..16);
                (e.src as usize, e.dst as usize, f64::from(k) / 8.0)
            }),
        ).unwrap();
        let snap = infected_prefix(&w, count.min(w.node_count()));
        let c = contract(&w, &snap).unwrap();
        let mask = snap.mask(w.node_count());
        let boundary: f64 = w.edges().iter()
            .filter(|e| mask[e.src as usize] != mask[e.dst as usize])
            .map(|e| e.weight).sum();
        let outside: f64 = w.edges().iter()
            .filter(|e| !mask[e.src as usize] && !mask[e.dst as usize])
            .map(|e| e.weight).sum();
        let at_super: f64 = c.graph.out_arcs(c.super_node).iter().map(|a| c.graph.weight(a.edge)).sum();
        let total: f64 = c.graph.edges().iter().map(|e| e.weight).sum();
        prop_assert_eq!(at_super, boundary);
        prop_assert_eq!(total, boundary + outside);
        prop_assert_eq!(connected_components(&c.graph).len(), 1);
    }

    #[test]
    fn fractional_ranks_sum_to_triangle(scores in proptest::collection::vec(-3i32..3, 1..30)) {
        let s: Vec<f64> = scores.iter().map(|&x| f64::from(x)).collect();
        let m = s.len() as f64;
        for desc in [true, false] {
            let r = fractional_ranks(&s, desc);
            prop_assert!((r.iter().sum::<f64>() - m * (m + 1.0) / 2.0).abs() < 1e-9);
            prop_assert!(r.iter().all(|&x| (1.0..=m).contains(&x)));
        }
    }

    #[test]
    fn hamming_weights_error_types(
        y in proptest::collection::vec(any::<bool>(), 1..20),
        flips in proptest::collection::vec(any::<bool>(), 20),
        alpha in 0.0f64..1.0,
    ) {
        let x: Vec<bool> = y.iter().zip(&flips).map(|(&a, &f)| a ^ f).collect();
        let fp = y.iter().zip(&x).filter(|(&a, &b)| !a && b).count() as f64;
        let fne = y.iter().zip(&x).filter(|(&a, &b)| a && !b).count() as f64;
        let h = weighted_hamming(&y, &x, alpha);
        prop_assert!((h - (alpha * fp + (1.0 - alpha) * fne)).abs() < 1e-12);
        prop_assert_eq!(weighted_hamming(&y, &y, alpha), 0.0);
    }
}
