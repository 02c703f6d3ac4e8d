//! Corruption-sweep benchmarks for learning-augmented k-means.
//!
//! An experiment clusters a dataset with a best-of-restarts k-means++
//! baseline, corrupts the baseline labels at each configured error rate, and
//! records the cost of clustering seeded from the corrupted labels, with and
//! without Lloyd refinement, relative to the baseline cost.

pub mod cli;
pub mod config;
pub mod emit;
mod error;
pub mod experiment;
pub mod source;

pub use config::{ExperimentConfig, Subsample};
pub use emit::{emit_results, Format};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, CellResult, ExperimentResult, Variant};
pub use source::{DatasetSource, SynthParams};
