//! Learning-augmented k-means clustering.
//!
//! A label predictor (nearest neighbor, noisy oracle, or labels read from a
//! file) seeds k-means centers, optionally in a PCA-reduced space, and Lloyd
//! iterations refine them. Costs are always reported on the original points.
//!
//! ```
//! use lakm_core::{datasets::synth_gmm, predictors::Predictor, augmented::*};
//!
//! let ds = synth_gmm(3, 30, 5, 12.0, 1.0, 7).unwrap();
//! let truth = ds.labels.clone().unwrap();
//! let predictor = Predictor::noisy(truth, 0.3, 1).unwrap();
//! let out = predictor_clustering(&ds.points, &predictor, &PipelineConfig::new(3)).unwrap();
//! assert!(out.result.cost <= out.seed_cost);
//! ```

pub mod augmented;
pub mod datasets;
mod error;
pub mod kmeans;
pub mod matrix;
pub mod pca;
pub mod predictors;
pub mod rng;

pub use augmented::{
    centers_from_labels, coordinate_trimmed_mean, cost_ratio, predictor_clustering, PipelineConfig,
    PipelineResult, SeedingMode,
};
pub use error::{Error, Result};
pub use kmeans::{Centers, ClusteringResult, InitMethod, Labeling, LloydConfig};
pub use matrix::{EigenPairs, Matrix};
pub use pca::{PcaModel, PcaPolicy};
pub use predictors::Predictor;
