//! Source inference for spreading processes on networks.
//!
//! The crate builds path-based diffusion kernels, where the probability that
//! node `j` is infected by time `t` given source `i` is modeled by the
//! traversal times of up to `k` edge-disjoint shortest paths, and inverts
//! them with maximum-likelihood and minimum-error estimators. A continuous
//! time SI simulator provides ground truth.
//!
//! ```
//! use infusion::graph::Graph;
//! use infusion::observation::InfectionSnapshot;
//! use infusion::single::{ni_ml_scores, SingleConfig};
//!
//! let g = Graph::unweighted(4, false, [(0, 1), (1, 2), (2, 3)]).unwrap();
//! let snap = InfectionSnapshot::new(Some(1.0), vec![0, 1, 2]);
//! let table = ni_ml_scores(&g, &snap, 1.0, &SingleConfig::default()).unwrap();
//! assert_eq!(table.best().unwrap().node, 1);
//! ```

pub mod baselines;
pub mod contraction;
pub mod error;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod mean_field;
pub mod multi;
pub mod observation;
pub mod paths;
pub mod rank;
pub mod rng;
pub mod simulate;
pub mod single;

pub use error::{Error, Result};
