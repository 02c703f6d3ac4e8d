use lakm_core::{LloydConfig, PcaPolicy, SeedingMode};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::source::DatasetSource;

pub const DEFAULT_TRIALS: usize = 5;
pub const DEFAULT_BASELINE_RESTARTS: usize = 10;

/// `0.0, 0.1, …, 1.0`.
pub fn default_error_rates() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsample {
    pub count: usize,
    pub seed: u64,
}

/// A corruption sweep: every `(error_rate, trial)` cell clusters the data from
/// noisy copies of the baseline labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub k: usize,
    pub error_rates: Vec<f64>,
    pub trials: usize,
    /// Defaults to keeping 95% of the explained variance.
    pub pca: Option<PcaPolicy>,
    pub standardize: bool,
    pub seeding: SeedingMode,
    pub baseline_restarts: usize,
    pub master_seed: u64,
    pub subsample: Option<Subsample>,
    /// Emit the refined variant next to the seed-only one.
    pub refine: bool,
    pub lloyd: LloydConfig,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSource, k: usize) -> Self {
        ExperimentConfig {
            dataset,
            k,
            error_rates: default_error_rates(),
            trials: DEFAULT_TRIALS,
            pca: Some(PcaPolicy::default()),
            standardize: false,
            seeding: SeedingMode::default(),
            baseline_restarts: DEFAULT_BASELINE_RESTARTS,
            master_seed: 0,
            subsample: None,
            refine: true,
            lloyd: LloydConfig::default(),
        }
    }

    /// Checks everything that does not need the data.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(BenchError::config("k must be at least 1"));
        }
        if self.trials == 0 {
            return Err(BenchError::config("trials must be at least 1"));
        }
        if self.baseline_restarts == 0 {
            return Err(BenchError::config("baseline restarts must be at least 1"));
        }
        for &r in &self.error_rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(BenchError::config(format!("error rate {r} is outside [0, 1]")));
            }
        }
        if self.error_rates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BenchError::config("error rates must be strictly ascending"));
        }
        if let Some(s) = &self.subsample {
            if s.count < self.k {
                return Err(BenchError::config(format!(
                    "subsample of {} rows is smaller than k = {}",
                    s.count, self.k
                )));
            }
        }
        if let Some(p) = &self.pca {
            p.validate().map_err(|e| BenchError::config(format!("pca: {e}")))?;
        }
        self.seeding
            .validate()
            .map_err(|e| BenchError::config(format!("trim alpha: {e}")))?;
        self.lloyd.validate()?;
        Ok(())
    }
}
