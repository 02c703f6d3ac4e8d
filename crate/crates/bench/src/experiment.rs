use std::time::Instant;

use lakm_core::kmeans::best_of_restarts;
use lakm_core::rng::derive_seed;
use lakm_core::{cost_ratio, predictor_clustering, InitMethod, LloydConfig, PipelineConfig, Predictor};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Seed streams for the parts of an experiment that are not grid cells.
const DATA_STREAM: u64 = u64::MAX;
const SUBSAMPLE_STREAM: u64 = u64::MAX - 1;
const BASELINE_STREAM: u64 = u64::MAX - 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Centers averaged from the noisy labels, no Lloyd iterations.
    SeedOnly,
    /// Noisy-label centers refined by Lloyd iterations.
    Refined,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::SeedOnly => "seed-only",
            Variant::Refined => "refined",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seed-only" => Ok(Variant::SeedOnly),
            "refined" => Ok(Variant::Refined),
            _ => Err(BenchError::config(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub rate_index: usize,
    pub error_rate: f64,
    pub trial: usize,
    pub variant: Variant,
    pub seed: u64,
    pub method_cost: f64,
    pub baseline_cost: f64,
    pub cost_ratio: f64,
    pub iterations: usize,
    /// Dimension the clustering ran in.
    pub reduced_dim: usize,
    pub wall_time_s: f64,
    /// Lloyd time divided by iteration count; zero when nothing ran.
    pub lloyd_time_per_iter_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub provenance: String,
    pub points: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub library_version: String,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub baseline_cost: f64,
    pub baseline_iterations: usize,
    /// Sorted by rate index, trial, then variant.
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    pub fn variants(&self) -> &'static [Variant] {
        variants(self.config.refine)
    }

    /// Mean cost ratio of `variant` at each configured rate.
    pub fn mean_ratios(&self, variant: Variant) -> Vec<f64> {
        (0..self.config.error_rates.len())
            .map(|ri| {
                let (sum, n) = self
                    .cells
                    .iter()
                    .filter(|c| c.rate_index == ri && c.variant == variant)
                    .fold((0.0, 0usize), |(s, n), c| (s + c.cost_ratio, n + 1));
                sum / n as f64
            })
            .collect()
    }
}

/// Variants emitted per cell: seed-only always, refined when enabled.
pub fn variants(refine: bool) -> &'static [Variant] {
    if refine {
        &[Variant::SeedOnly, Variant::Refined]
    } else {
        &[Variant::SeedOnly]
    }
}

/// Seed of the noisy predictor for one grid cell.
pub fn cell_seed(master_seed: u64, rate_index: usize, trial: usize) -> u64 {
    derive_seed(master_seed, &[rate_index as u64, trial as u64])
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;

    let mut ds = cfg.dataset.load(derive_seed(cfg.master_seed, &[DATA_STREAM]))?;
    if let Some(s) = cfg.subsample {
        if s.count > ds.points.rows() {
            return Err(BenchError::config(format!(
                "subsample of {} rows requested from {} points",
                s.count,
                ds.points.rows()
            )));
        }
        ds = ds.subsample(s.count, derive_seed(s.seed, &[SUBSAMPLE_STREAM]))?;
    }
    let x = &ds.points;
    if cfg.k > x.rows() {
        return Err(BenchError::config(format!("k = {} exceeds the {} points", cfg.k, x.rows())));
    }
    if let Some(lakm_core::PcaPolicy::FixedDim(r)) = cfg.pca {
        if r > x.cols() {
            return Err(BenchError::config(format!("pca dimension {r} exceeds the data dimension {}", x.cols())));
        }
    }

    let baseline_cfg = LloydConfig {
        seed: derive_seed(cfg.master_seed, &[BASELINE_STREAM]),
        ..cfg.lloyd
    };
    let baseline = best_of_restarts(x, cfg.k, cfg.baseline_restarts, &baseline_cfg, InitMethod::KMeansPlusPlus)?;
    let base_labels = baseline.labels.clone();

    let variants = variants(cfg.refine);
    let keys: Vec<(usize, usize, Variant)> = (0..cfg.error_rates.len())
        .flat_map(|ri| (0..cfg.trials).flat_map(move |t| variants.iter().map(move |&v| (ri, t, v))))
        .collect();

    let mut cells = keys
        .par_iter()
        .map(|&(ri, trial, variant)| {
            let rate = cfg.error_rates[ri];
            let seed = cell_seed(cfg.master_seed, ri, trial);
            let predictor = Predictor::noisy(base_labels.clone(), rate, seed)?;
            let pipeline = PipelineConfig {
                k: cfg.k,
                pca: cfg.pca,
                standardize: cfg.standardize,
                seeding: cfg.seeding,
                lloyd: cfg.lloyd,
                refine: variant == Variant::Refined,
            };
            let start = Instant::now();
            let out = predictor_clustering(x, &predictor, &pipeline)?;
            let wall = start.elapsed();
            let per_iter = if out.iterations > 0 {
                out.lloyd_time.as_secs_f64() / out.iterations as f64
            } else {
                0.0
            };
            Ok(CellResult {
                rate_index: ri,
                error_rate: rate,
                trial,
                variant,
                seed,
                method_cost: out.result.cost,
                baseline_cost: baseline.cost,
                cost_ratio: cost_ratio(out.result.cost, baseline.cost)?,
                iterations: out.iterations,
                reduced_dim: out.reduced_dim.unwrap_or(x.cols()),
                wall_time_s: wall.as_secs_f64(),
                lloyd_time_per_iter_s: per_iter,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    cells.sort_by_key(|c| (c.rate_index, c.trial, c.variant));

    Ok(ExperimentResult {
        schema_version: RESULT_SCHEMA_VERSION,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        dataset: DatasetSummary {
            name: ds.name.clone(),
            provenance: ds.provenance.clone(),
            points: x.rows(),
            dim: x.cols(),
        },
        baseline_cost: baseline.cost,
        baseline_iterations: baseline.iterations,
        cells,
    })
}
