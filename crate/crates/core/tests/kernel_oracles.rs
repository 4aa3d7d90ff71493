//! Kernel entries against hand-enumerated path products.

use infusion::graph::Graph;
use infusion::kernel::{erlang_cdf, DiffusionKernel, KernelLaw};
use infusion::rng;
use rand::Rng;

/// `1 - e^{-t} Σ_{i<l} t^i / i!`, summed directly.
fn erlang_oracle(l: u32, t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for i in 0..l {
        if i > 0 {
            term *= t / f64::from(i);
        }
        sum += term;
    }
    1.0 - (-t).exp() * sum
}

fn product(lengths: &[u32], t: f64) -> f64 {
    1.0 - lengths.iter().map(|&l| 1.0 - erlang_oracle(l, t)).product::<f64>()
}

fn assert_rel(got: f64, want: f64) {
    assert!(((got - want) / want).abs() < 1e-12, "got {got}, want {want}");
}

#[test]
fn cycle_entries_are_two_path_products() {
    let g = Graph::unweighted(6, false, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
    let kernel = DiffusionKernel::new(&g, KernelLaw::default(), 2, 0).unwrap();
    for t in [0.5, 1.0, 2.0, 4.0] {
        let row = kernel.row(0, t).unwrap();
        assert_rel(row.p(1), product(&[1, 5], t));
        assert_rel(row.p(2), product(&[2, 4], t));
        assert_rel(row.p(3), product(&[3, 3], t));
    }
}

#[test]
fn grid_entries_are_products() {
    // 3x3 lattice, row-major ids
    let mut edges = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let v = 3 * r + c;
            if c < 2 {
                edges.push((v, v + 1));
            }
            if r < 2 {
                edges.push((v, v + 3));
            }
        }
    }
    let g = Graph::unweighted(9, false, edges).unwrap();
    let k1 = DiffusionKernel::new(&g, KernelLaw::default(), 1, 0).unwrap();
    let k2 = DiffusionKernel::new(&g, KernelLaw::default(), 2, 0).unwrap();
    for t in [0.5, 1.0, 2.0, 4.0] {
        let one = k1.row(0, t).unwrap();
        let two = k2.row(0, t).unwrap();
        assert_rel(one.p(8), product(&[4], t));
        assert_rel(two.p(8), product(&[4, 4], t));
        assert_rel(two.p(4), product(&[2, 2], t));
        // the corner neighbor's second path goes around a unit square
        assert_rel(two.p(1), product(&[1, 3], t));
    }
}

#[test]
fn erlang_cdf_matches_closed_sum() {
    for l in [1u32, 2, 3, 5, 12] {
        for t in [0.01, 0.5, 1.0, 2.0, 7.5] {
            let want = erlang_oracle(l, t);
            // the direct sum cancels for small values, so compare absolutely
            assert!((erlang_cdf(l, t, 1.0) - want).abs() < 1e-14, "l={l} t={t}");
        }
    }
}

#[test]
fn erlang_cdf_matches_monte_carlo() {
    const SAMPLES: usize = 1_000_000;
    let mut r = rng::stream(9, &[rng::tag("erlang-mc")]);
    for l in [1u32, 2, 3, 5] {
        let sums: Vec<f64> = (0..SAMPLES)
            .map(|_| (0..l).map(|_| -(-r.random::<f64>()).ln_1p()).sum())
            .collect();
        for t in [0.5, 1.0, 2.0] {
            let p = erlang_cdf(l, t, 1.0);
            let hat = sums.iter().filter(|&&s| s <= t).count() as f64 / SAMPLES as f64;
            let sd = (p * (1.0 - p) / SAMPLES as f64).sqrt();
            assert!((hat - p).abs() <= 3.0 * sd, "l={l} t={t}: {hat} vs {p}");
        }
    }
}
