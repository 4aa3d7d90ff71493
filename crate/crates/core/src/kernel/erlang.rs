//! Erlang path-traversal law.
//!
//! The time to cross `l` edges with i.i.d. exponential(λ) holding times is
//! Erlang(l, λ), with `F(l, t) = P(N >= l)` for `N ~ Poisson(λt)`. Both the
//! CDF and the survival function are evaluated as sums of positive Poisson
//! terms (upper and lower tails respectively), so neither loses precision to
//! cancellation when it is small.

use crate::error::{Error, Result};

/// Exponential edge law shared by every edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErlangLaw {
    pub rate: f64,
}

impl Default for ErlangLaw {
    fn default() -> Self {
        ErlangLaw { rate: 1.0 }
    }
}

impl ErlangLaw {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::param(format!("rate must be positive and finite, got {rate}")));
        }
        Ok(ErlangLaw { rate })
    }

    pub fn cdf(&self, l: u32, t: f64) -> f64 {
        erlang_cdf(l, t, self.rate)
    }
}

/// `ln(k!)`.
pub fn ln_factorial(k: u64) -> f64 {
    if k <= 20 {
        let mut acc = 1.0f64;
        for i in 2..=k {
            acc *= i as f64;
        }
        return acc.ln();
    }
    // Stirling series for ln Γ(k + 1)
    let x = k as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Poisson(x) probabilities over the window of indices where they exceed
/// roughly 1e-300; everything outside is treated as zero.
pub(crate) struct PoissonWindow {
    pub lo: usize,
    pub weights: Vec<f64>,
}

const TINY: f64 = 1e-300;

impl PoissonWindow {
    pub(crate) fn new(x: f64) -> Self {
        debug_assert!(x >= 0.0 && x.is_finite());
        if x == 0.0 {
            return PoissonWindow {
                lo: 0,
                weights: vec![1.0],
            };
        }
        let mode = x.floor() as usize;
        let ln_mode = -x + mode as f64 * x.ln() - ln_factorial(mode as u64);
        let w_mode = ln_mode.exp();

        let mut below = Vec::new();
        let mut w = w_mode;
        let mut k = mode;
        while k > 0 {
            w *= k as f64 / x;
            k -= 1;
            if w < TINY {
                break;
            }
            below.push(w);
        }
        let lo = mode - below.len();

        let mut weights: Vec<f64> = below.into_iter().rev().collect();
        weights.push(w_mode);
        let mut w = w_mode;
        let mut k = mode;
        loop {
            k += 1;
            w *= x / k as f64;
            if w < TINY {
                break;
            }
            weights.push(w);
        }
        PoissonWindow { lo, weights }
    }

    pub(crate) fn hi(&self) -> usize {
        self.lo + self.weights.len() - 1
    }
}

/// `F(l, t)` and `1 - F(l, t)` for every `l` in `0..=max_len` at a fixed
/// `x = λt`.
#[derive(Clone, Debug)]
pub struct ErlangTable {
    x: f64,
    cdf: Vec<f64>,
    sf: Vec<f64>,
}

impl ErlangTable {
    pub fn new(rate: f64, t: f64, max_len: usize) -> Self {
        let x = (rate * t).max(0.0);
        let mut cdf = vec![0.0; max_len + 1];
        let mut sf = vec![1.0; max_len + 1];
        cdf[0] = 1.0;
        sf[0] = 0.0;
        if x == 0.0 {
            return ErlangTable { x, cdf, sf };
        }

        let win = PoissonWindow::new(x);
        let m = win.weights.len();
        // head[i] = sum of weights[..i], tail[i] = sum of weights[i..]
        let mut head = vec![0.0; m + 1];
        let mut acc = Sum::default();
        for i in 0..m {
            acc.add(win.weights[i]);
            head[i + 1] = acc.value();
        }
        let mut tail = vec![0.0; m + 1];
        let mut acc = Sum::default();
        for i in (0..m).rev() {
            acc.add(win.weights[i]);
            tail[i] = acc.value();
        }
        let total = head[m];

        for l in 1..=max_len {
            // P(N >= l) and P(N <= l - 1)
            let (c, s) = if l <= win.lo {
                (total, 0.0)
            } else if l > win.hi() {
                (0.0, total)
            } else {
                let i = l - win.lo;
                (tail[i], head[i])
            };
            cdf[l] = (c / total).clamp(0.0, 1.0);
            sf[l] = (s / total).clamp(0.0, 1.0);
        }
        ErlangTable { x, cdf, sf }
    }

    /// The Poisson mean `λt` the table was built for.
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn max_len(&self) -> usize {
        self.cdf.len() - 1
    }

    pub fn cdf(&self, l: usize) -> f64 {
        self.cdf[l]
    }

    pub fn sf(&self, l: usize) -> f64 {
        self.sf[l]
    }
}

/// Probability that `l` exponential(λ) stages complete by time `t`.
pub fn erlang_cdf(l: u32, t: f64, rate: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    ErlangTable::new(rate, t, l as usize).cdf(l as usize)
}

/// `1 - erlang_cdf(l, t, rate)`, computed without cancellation.
pub fn erlang_sf(l: u32, t: f64, rate: f64) -> f64 {
    if l == 0 {
        return 0.0;
    }
    if t <= 0.0 {
        return 1.0;
    }
    ErlangTable::new(rate, t, l as usize).sf(l as usize)
}
