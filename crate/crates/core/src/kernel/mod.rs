//! Path-based diffusion kernel.
//!
//! `p_ij(t) = 1 - Π_r (1 - F_r(t))` where `F_r` is the traversal-time CDF of
//! the `r`-th edge-disjoint shortest path from `i` to `j`. Values are clamped
//! to `[P_FLOOR, P_CAP]` so that both `ln p` and `ln(1 - p)` stay finite.

pub mod erlang;
pub mod phase_type;

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::paths::{all_pairs_profiles, k_disjoint_shortest_paths, PathLengthProfile, PathMetric};

pub use erlang::{erlang_cdf, erlang_sf, ErlangLaw, ErlangTable};
pub use phase_type::{hypoexp_cdf, hypoexp_cdf_sf, EdgeMixture, PhaseTypeLaw};

/// Probability assigned to unreachable targets and lower clamp.
pub const P_FLOOR: f64 = 1e-6;
/// Upper clamp, keeps `ln(1 - p)` finite.
pub const P_CAP: f64 = 1.0 - 1e-12;
const Q_FLOOR: f64 = 1e-12;

/// An infection probability together with its complement, each computed
/// directly so that neither suffers from cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prob {
    pub p: f64,
    pub q: f64,
}

impl Prob {
    pub const FLOOR: Prob = Prob {
        p: P_FLOOR,
        q: 1.0 - P_FLOOR,
    };
    pub const CAP: Prob = Prob { p: P_CAP, q: Q_FLOOR };

    /// Clamps to `[P_FLOOR, P_CAP]`.
    pub fn clamped(p: f64, q: f64) -> Prob {
        if !(p >= P_FLOOR) {
            Prob::FLOOR
        } else if !(q >= Q_FLOOR) {
            Prob::CAP
        } else {
            Prob { p, q }
        }
    }

    /// Builds a probability from `ln q` (log of the complement).
    pub fn from_ln_q(ln_q: f64) -> Prob {
        Prob::clamped(-ln_q.exp_m1(), ln_q.exp())
    }

    pub fn ln_q(&self) -> f64 {
        if self.q > 0.5 {
            (-self.p).ln_1p()
        } else {
            self.q.ln()
        }
    }

    pub fn ln_p(&self) -> f64 {
        if self.p > 0.5 {
            (-self.q).ln_1p()
        } else {
            self.p.ln()
        }
    }
}

/// `1 - Π_r (1 - F_r)` from per-path `(cdf, sf)` pairs, clamped. An empty
/// iterator (unreachable target) yields the floor.
pub fn complement_product<I>(paths: I) -> Prob
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut ln_q = 0.0;
    let mut any = false;
    for (cdf, sf) in paths {
        any = true;
        ln_q += path_ln_q(cdf, sf);
    }
    if !any {
        return Prob::FLOOR;
    }
    Prob::from_ln_q(ln_q)
}

fn path_ln_q(cdf: f64, sf: f64) -> f64 {
    if cdf < 0.5 {
        (-cdf).ln_1p()
    } else {
        sf.ln()
    }
}

/// Per-edge holding-time laws for heterogeneous spreading. Edges without an
/// entry use a single exponential with rate equal to the edge weight.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeLaws {
    mixtures: BTreeMap<u32, EdgeMixture>,
}

impl EdgeLaws {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_mixture(mut self, edge: u32, mixture: EdgeMixture) -> Self {
        self.mixtures.insert(edge, mixture);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.mixtures.is_empty()
    }

    pub fn mixture(&self, edge: u32) -> Option<&EdgeMixture> {
        self.mixtures.get(&edge)
    }
}

/// Traversal-time law of paths.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelLaw {
    /// Every edge is exponential with the same rate; paths are measured in hops.
    Erlang(ErlangLaw),
    /// Edge rates come from weights (or mixtures); paths are measured by
    /// mean holding time.
    PhaseType(EdgeLaws),
}

impl Default for KernelLaw {
    fn default() -> Self {
        KernelLaw::Erlang(ErlangLaw::default())
    }
}

impl KernelLaw {
    pub fn metric(&self) -> PathMetric {
        match self {
            KernelLaw::Erlang(_) => PathMetric::Hops,
            KernelLaw::PhaseType(_) => PathMetric::InverseRate,
        }
    }

    pub fn has_mixtures(&self) -> bool {
        matches!(self, KernelLaw::PhaseType(laws) if !laws.is_empty())
    }
}

/// One row of the kernel matrix: `p_{source, j}(t)` for every node `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelRow {
    pub source: usize,
    pub t: f64,
    pub probs: Vec<Prob>,
}

impl KernelRow {
    pub fn p(&self, j: usize) -> f64 {
        self.probs[j].p
    }
}

/// Kernel configuration bound to a graph.
#[derive(Clone, Debug)]
pub struct DiffusionKernel<'g> {
    graph: Cow<'g, Graph>,
    law: KernelLaw,
    k: usize,
    seed: u64,
}

impl<'g> DiffusionKernel<'g> {
    pub fn new(g: &'g Graph, law: KernelLaw, k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        let graph = match &law {
            KernelLaw::PhaseType(laws) if !laws.is_empty() => {
                if let Some((&e, _)) = laws.mixtures.range(g.edge_count() as u32..).next() {
                    return Err(Error::param(format!("mixture given for unknown edge {e}")));
                }
                // path selection measures mixture edges by their mean holding time
                let edges = g.edges().iter().enumerate().map(|(i, e)| {
                    let w = laws
                        .mixture(i as u32)
                        .map_or(e.weight, EdgeMixture::effective_rate);
                    (e.src, e.dst, w)
                });
                Cow::Owned(Graph::from_edges(g.node_count(), g.is_directed(), edges)?)
            }
            _ => Cow::Borrowed(g),
        };
        Ok(DiffusionKernel { graph, law, k, seed })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn law(&self) -> &KernelLaw {
        &self.law
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn profile(&self, source: usize) -> Result<PathLengthProfile> {
        k_disjoint_shortest_paths(&self.graph, source, self.k, self.law.metric(), self.seed)
    }

    pub fn profiles(&self, sources: &[usize]) -> Result<Vec<PathLengthProfile>> {
        all_pairs_profiles(&self.graph, sources, self.k, self.law.metric(), self.seed)
    }

    /// Evaluator for a fixed time.
    pub fn at(&self, t: f64) -> KernelSlice<'_> {
        let table = match &self.law {
            KernelLaw::Erlang(law) if t > 0.0 => {
                Some(ErlangTable::new(law.rate, t, self.graph.node_count().max(1)))
            }
            _ => None,
        };
        KernelSlice {
            kernel: self,
            t,
            table,
        }
    }

    pub fn row(&self, source: usize, t: f64) -> Result<KernelRow> {
        let profile = self.profile(source)?;
        Ok(self.at(t).row(&profile))
    }
}

/// Kernel evaluation at one time point.
pub struct KernelSlice<'a> {
    kernel: &'a DiffusionKernel<'a>,
    t: f64,
    table: Option<ErlangTable>,
}

impl KernelSlice<'_> {
    pub fn t(&self) -> f64 {
        self.t
    }

    /// `p_{source, target}(t)` for the profile's source.
    pub fn value(&self, profile: &PathLengthProfile, target: usize) -> Prob {
        if target == profile.source() {
            return Prob::CAP;
        }
        if self.t <= 0.0 {
            return Prob::FLOOR;
        }
        let paths = profile.paths(target);
        match (&self.kernel.law, &self.table) {
            (KernelLaw::Erlang(_), Some(table)) => {
                complement_product(paths.iter().map(|e| {
                    let l = e.hops as usize;
                    (table.cdf(l), table.sf(l))
                }))
            }
            (KernelLaw::PhaseType(laws), _) => {
                let g = self.kernel.graph();
                complement_product(paths.iter().map(|e| {
                    let edges = profile.path_edges(e);
                    if laws.is_empty() {
                        let rates: Vec<f64> = edges.iter().map(|&id| g.weight(id)).collect();
                        hypoexp_cdf_sf(&rates, self.t)
                    } else {
                        let per_edge: Vec<EdgeMixture> = edges
                            .iter()
                            .map(|&id| {
                                laws.mixture(id).cloned().unwrap_or_else(|| {
                                    EdgeMixture::new(vec![(1.0, g.weight(id))])
                                        .expect("graph weights are valid rates")
                                })
                            })
                            .collect();
                        PhaseTypeLaw::from_edges(&per_edge).cdf_sf(self.t)
                    }
                }))
            }
            (KernelLaw::Erlang(_), None) => Prob::FLOOR,
        }
    }

    /// Probabilities of a target reached by a single path of `l` hops, for
    /// `l` in `0..=max_len`, when the law is Erlang.
    pub fn single_path_table(&self, max_len: usize) -> Option<Vec<Prob>> {
        let table = self.table.as_ref()?;
        let max_len = max_len.min(table.max_len());
        Some(
            (0..=max_len)
                .map(|l| complement_product(std::iter::once((table.cdf(l), table.sf(l)))))
                .collect(),
        )
    }

    /// Per-path summand of `ln(1 - p)` for a path of `l` hops, for `l` in
    /// `0..=max_len`, when the law is Erlang. Summing the entries of a
    /// target's paths and applying [`Prob::from_ln_q`] reproduces
    /// [`KernelSlice::value`].
    pub fn path_ln_q_table(&self, max_len: usize) -> Option<Vec<f64>> {
        let table = self.table.as_ref()?;
        let max_len = max_len.min(table.max_len());
        Some((0..=max_len).map(|l| path_ln_q(table.cdf(l), table.sf(l))).collect())
    }

    pub fn row(&self, profile: &PathLengthProfile) -> KernelRow {
        let n = profile.node_count();
        KernelRow {
            source: profile.source(),
            t: self.t,
            probs: (0..n).map(|j| self.value(profile, j)).collect(),
        }
    }
}

/// Probability that `j` is infected by at least one of several independent
/// sources: `1 - Π_s (1 - p_{s,j})`.
pub fn multi_source_prob(rows: &[&KernelRow], j: usize) -> Prob {
    let ln_q: f64 = rows.iter().map(|r| r.probs[j].ln_q()).sum();
    Prob::from_ln_q(ln_q)
}
