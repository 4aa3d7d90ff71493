//! Hypoexponential (bidiagonal phase-type) traversal law.
//!
//! A path whose edges have exponential holding times with rates
//! `λ_1, …, λ_m` is crossed after a hypoexponential time: the absorption time
//! of a chain that moves one state forward at rate `λ_i`. The CDF is computed
//! by partial fractions when the rates are well separated and by
//! uniformization otherwise.

use super::erlang::{erlang_cdf, erlang_sf, PoissonWindow, Sum};
use crate::error::{Error, Result};

const MIN_REL_GAP: f64 = 1e-6;
const MAX_CONDITION: f64 = 1e4;
const TRUNCATION: f64 = 1e-12;

/// `(F(t), 1 - F(t))` of the sum of independent exponentials with the given
/// rates. The order of the rates does not matter.
pub fn hypoexp_cdf_sf(rates: &[f64], t: f64) -> (f64, f64) {
    debug_assert!(rates.iter().all(|&r| r > 0.0 && r.is_finite()));
    if rates.is_empty() {
        return (1.0, 0.0);
    }
    if t <= 0.0 {
        return (0.0, 1.0);
    }
    if rates.len() == 1 {
        let x = rates[0] * t;
        return (-(-x).exp_m1(), (-x).exp());
    }
    if rates.iter().all(|&r| r == rates[0]) {
        let l = rates.len() as u32;
        return (erlang_cdf(l, t, rates[0]), erlang_sf(l, t, rates[0]));
    }

    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let separated = sorted
        .windows(2)
        .all(|w| (w[1] - w[0]) > MIN_REL_GAP * w[1]);
    if separated {
        if let Some(pair) = partial_fractions(&sorted, t) {
            return pair;
        }
    }
    uniformized(rates, t)
}

pub fn hypoexp_cdf(rates: &[f64], t: f64) -> f64 {
    hypoexp_cdf_sf(rates, t).0
}

/// `sf(t) = Σ_i C_i exp(-λ_i t)` with `C_i = Π_{j≠i} λ_j / (λ_j - λ_i)`.
/// Returns `None` when the alternating sum cancels too much to be trusted.
fn partial_fractions(rates: &[f64], t: f64) -> Option<(f64, f64)> {
    let mut sf = Sum::default();
    let mut magnitude = 0.0;
    for (i, &li) in rates.iter().enumerate() {
        let mut c = 1.0;
        for (j, &lj) in rates.iter().enumerate() {
            if i != j {
                c *= lj / (lj - li);
            }
        }
        let term = c * (-li * t).exp();
        magnitude += term.abs();
        sf.add(term);
    }
    let sf = sf.value();
    if !(sf > 0.0) || magnitude / sf > MAX_CONDITION {
        return None;
    }
    let cdf = 1.0 - sf;
    // a small CDF is the difference of two nearly equal numbers
    let rounding = magnitude * f64::EPSILON * 10.0 * rates.len() as f64;
    if rounding > 1e-10 * cdf {
        return None;
    }
    Some((cdf, sf.min(1.0)))
}

/// Uniformization with rate `Λ = max λ_i`: the embedded jump chain either
/// stays (probability `1 - λ_i/Λ`) or advances. Absorbed and transient mass
/// are tracked separately so both tails stay accurate.
fn uniformized(rates: &[f64], t: f64) -> (f64, f64) {
    let big = rates.iter().cloned().fold(0.0, f64::max);
    let x = big * t;
    let win = PoissonWindow::new(x);
    let m = rates.len();
    let advance: Vec<f64> = rates.iter().map(|&r| r / big).collect();

    let mut state = vec![0.0; m];
    state[0] = 1.0;
    let mut absorbed = 0.0;
    let mut cdf = Sum::default();
    let mut sf = Sum::default();
    let mut covered = 0.0;
    for n in 0..=win.hi() {
        if n >= win.lo {
            let w = win.weights[n - win.lo];
            cdf.add(w * absorbed);
            sf.add(w * state.iter().sum::<f64>());
            covered += w;
            if n as f64 > x && 1.0 - covered < TRUNCATION * 1e-3 {
                break;
            }
        }
        // one jump of the uniformized chain, last state first
        absorbed += state[m - 1] * advance[m - 1];
        for i in (0..m).rev() {
            let inflow = if i > 0 { state[i - 1] * advance[i - 1] } else { 0.0 };
            state[i] = state[i] * (1.0 - advance[i]) + inflow;
        }
    }
    let (c, s) = (cdf.value(), sf.value());
    let total = c + s;
    ((c / total).clamp(0.0, 1.0), (s / total).clamp(0.0, 1.0))
}

/// One edge's holding-time law: a single rate, or a finite mixture of rates.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMixture {
    components: Vec<(f64, f64)>,
}

impl EdgeMixture {
    /// `components` are `(probability, rate)` pairs.
    pub fn new(components: Vec<(f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("edge mixture needs at least one component"));
        }
        for &(p, r) in &components {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("mixture probability {p} outside [0, 1]")));
            }
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::param(format!("mixture rate {r} must be positive")));
            }
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("mixture probabilities sum to {total}, not 1")));
        }
        Ok(EdgeMixture { components })
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    /// Mean holding time, used as the edge length for path selection.
    pub fn mean_time(&self) -> f64 {
        self.components.iter().map(|&(p, r)| p / r).sum()
    }

    /// The single rate with the same mean holding time.
    pub fn effective_rate(&self) -> f64 {
        1.0 / self.mean_time()
    }
}

/// Traversal law of one path: a mixture of rate sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTypeLaw {
    components: Vec<(f64, Vec<f64>)>,
}

impl PhaseTypeLaw {
    pub fn hypoexponential(rates: Vec<f64>) -> Result<Self> {
        Self::mixture(vec![(1.0, rates)])
    }

    pub fn mixture(components: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("phase-type law needs at least one component"));
        }
        for (p, rates) in &components {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::param(format!("mixture weight {p} outside [0, 1]")));
            }
            if rates.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
                return Err(Error::param("phase-type rates must be positive and finite"));
            }
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(PhaseTypeLaw { components })
    }

    /// Expands per-edge mixtures along a path into the product mixture.
    pub fn from_edges(edges: &[EdgeMixture]) -> Self {
        let mut components = vec![(1.0, Vec::with_capacity(edges.len()))];
        for edge in edges {
            if let [(_, rate)] = edge.components() {
                for c in &mut components {
                    c.1.push(*rate);
                }
                continue;
            }
            let mut next = Vec::with_capacity(components.len() * edge.components().len());
            for (p, rates) in &components {
                for &(q, r) in edge.components() {
                    let mut seq = rates.clone();
                    seq.push(r);
                    next.push((p * q, seq));
                }
            }
            components = next;
        }
        PhaseTypeLaw { components }
    }

    pub fn components(&self) -> &[(f64, Vec<f64>)] {
        &self.components
    }

    pub fn cdf_sf(&self, t: f64) -> (f64, f64) {
        let mut cdf = 0.0;
        let mut sf = 0.0;
        for (p, rates) in &self.components {
            let (c, s) = hypoexp_cdf_sf(rates, t);
            cdf += p * c;
            sf += p * s;
        }
        (cdf.clamp(0.0, 1.0), sf.clamp(0.0, 1.0))
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.cdf_sf(t).0
    }
}
