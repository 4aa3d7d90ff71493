//! Network generators, shortest-path overlap statistics and the
//! rank-evaluation experiments built on top of `infusion`.

pub mod experiment;
pub mod generators;
pub mod overlap;
pub mod plot;

pub use experiment::{evaluate_rank, ExperimentResult, ExperimentSpec, GeneratorSpec, SourceRule};
