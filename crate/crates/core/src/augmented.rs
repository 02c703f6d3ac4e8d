//! Predictor-seeded clustering.
//!
//! The pipeline optionally reduces the data with PCA, asks a predictor for a
//! label per point, turns those labels into initial centers with a plain or
//! trimmed coordinate-wise mean, refines them with Lloyd iterations, and
//! reports centers and cost on the original, unreduced points.

use std::borrow::Cow;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::{argmax_available, cost, lloyd, update_centers, Centers, ClusteringResult, Labeling, LloydConfig};
use crate::matrix::{mean_rows, sq_dist, Matrix};
use crate::pca::{PcaModel, PcaPolicy};
use crate::predictors::Predictor;

pub const DEFAULT_TRIM_ALPHA: f64 = 0.1;

/// Tolerance when turning `alpha · n` into a whole number of trimmed values.
const TRIM_COUNT_SLACK: f64 = 1e-9;

/// How labeled points are averaged into a center.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SeedingMode {
    #[default]
    CoordinateMean,
    /// Per coordinate, drop the `⌈alpha·n⌉` smallest and largest values.
    TrimmedMean { alpha: f64 },
}

impl SeedingMode {
    pub fn trimmed() -> Self {
        SeedingMode::TrimmedMean {
            alpha: DEFAULT_TRIM_ALPHA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SeedingMode::TrimmedMean { alpha } if !(0.0..0.5).contains(&alpha) => {
                Err(Error::Config(format!("trim alpha {alpha} is outside [0, 0.5)")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k: usize,
    pub pca: Option<PcaPolicy>,
    /// Divide columns by their standard deviation before PCA.
    #[serde(default)]
    pub standardize: bool,
    pub seeding: SeedingMode,
    pub lloyd: LloydConfig,
    /// Run Lloyd iterations after seeding.
    pub refine: bool,
}

impl PipelineConfig {
    pub fn new(k: usize) -> Self {
        PipelineConfig {
            k,
            pca: None,
            standardize: false,
            seeding: SeedingMode::default(),
            lloyd: LloydConfig::default(),
            refine: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if let Some(p) = &self.pca {
            p.validate()?;
        }
        self.seeding.validate()?;
        self.lloyd.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    /// Centers, labels and cost on the original points. `cost_history` holds
    /// the Lloyd costs in the working (possibly reduced) space.
    pub result: ClusteringResult,
    pub reduced_dim: Option<usize>,
    pub cost_ratio: Option<f64>,
    pub iterations: usize,
    /// Cost of the predictor-derived centers in the working space.
    pub seed_cost: f64,
    pub lloyd_time: Duration,
}

/// Coordinate-wise trimmed mean of the rows of `points`.
///
/// With `alpha = 0` this is exactly [`mean_rows`]. When trimming would leave
/// nothing, the coordinate falls back to its median.
pub fn coordinate_trimmed_mean(points: &Matrix, alpha: f64) -> Result<Vec<f64>> {
    if points.rows() == 0 {
        return Err(Error::domain("trimmed mean of an empty point set"));
    }
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::domain(format!("trim alpha {alpha} is outside [0, 0.5)")));
    }
    let n = points.rows();
    let trim = ((alpha * n as f64) - TRIM_COUNT_SLACK).ceil().max(0.0) as usize;
    if trim == 0 {
        return mean_rows(points);
    }
    let mut col = vec![0.0; n];
    Ok((0..points.cols())
        .map(|j| {
            for (c, row) in col.iter_mut().zip(points.row_iter()) {
                *c = row[j];
            }
            col.sort_by(f64::total_cmp);
            if 2 * trim < n {
                let kept = &col[trim..n - trim];
                kept.iter().sum::<f64>() / kept.len() as f64
            } else if n % 2 == 1 {
                col[n / 2]
            } else {
                0.5 * (col[n / 2 - 1] + col[n / 2])
            }
        })
        .collect())
}

/// One center per label class, averaged according to `mode`.
///
/// A class with no points takes the point farthest from the global mean that
/// has not already been used this way (lowest index on ties).
pub fn centers_from_labels(x: &Matrix, labels: &Labeling, k: usize, mode: SeedingMode) -> Result<Centers> {
    if labels.len() != x.rows() {
        return Err(Error::domain(format!(
            "{} labels for {} points",
            labels.len(),
            x.rows()
        )));
    }
    if x.rows() == 0 {
        return Err(Error::domain("cannot seed centers from zero points"));
    }
    if let Some(&bad) = labels.as_slice().iter().find(|&&l| l >= k) {
        return Err(Error::domain(format!("label {bad} is not below k = {k}")));
    }
    mode.validate().map_err(|e| Error::Domain(e.to_string()))?;

    let d = x.cols();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.as_slice().iter().enumerate() {
        members[l].push(i);
    }
    let mut values = vec![0.0; k * d];
    let mut empty = Vec::new();
    for (j, idx) in members.iter().enumerate() {
        if idx.is_empty() {
            empty.push(j);
            continue;
        }
        let sub = x.select_rows(idx);
        let c = match mode {
            SeedingMode::CoordinateMean => mean_rows(&sub)?,
            SeedingMode::TrimmedMean { alpha } => coordinate_trimmed_mean(&sub, alpha)?,
        };
        values[j * d..(j + 1) * d].copy_from_slice(&c);
    }
    if !empty.is_empty() {
        let global = mean_rows(x)?;
        let mut far: Vec<f64> = x.row_iter().map(|r| sq_dist(r, &global)).collect();
        for j in empty {
            let pick = argmax_available(&far).ok_or_else(|| {
                Error::domain(format!("cannot re-seed empty class {j}: too few points"))
            })?;
            values[j * d..(j + 1) * d].copy_from_slice(x.row(pick));
            far[pick] = f64::NEG_INFINITY;
        }
    }
    Centers::new(Matrix::new(k, d, values)?)
}

/// Run the predictor-seeded clustering pipeline on `x`.
///
/// Label predictors are used as given. A nearest-neighbor predictor is rebuilt
/// in the reduced space by projecting its reference points with the same
/// fitted PCA model. Without refinement, the final centers are the seeded
/// averages of the predicted classes computed on the original points.
pub fn predictor_clustering(x: &Matrix, predictor: &Predictor, cfg: &PipelineConfig) -> Result<PipelineResult> {
    cfg.validate().map_err(|e| Error::Domain(e.to_string()))?;
    if x.rows() < cfg.k {
        return Err(Error::domain(format!(
            "k = {} exceeds the number of points ({})",
            cfg.k,
            x.rows()
        )));
    }
    if predictor.k() > cfg.k {
        return Err(Error::domain(format!(
            "predictor emits up to {} labels but the pipeline has k = {}",
            predictor.k(),
            cfg.k
        )));
    }

    let model = cfg
        .pca
        .map(|p| PcaModel::fit_with(x, p, cfg.standardize))
        .transpose()?;
    let working: Cow<'_, Matrix> = match &model {
        Some(m) => Cow::Owned(m.transform(x)?),
        None => Cow::Borrowed(x),
    };

    let predicted = match (predictor, &model) {
        (
            Predictor::NearestNeighbor {
                reference_points,
                reference_labels,
            },
            Some(m),
        ) => Predictor::nearest_neighbor(m.transform(reference_points)?, reference_labels.clone())?
            .predict(&working)?,
        _ => predictor.predict(&working)?,
    };
    let predicted = Labeling::new(predicted.into_vec(), cfg.k)?;

    let seeds = centers_from_labels(&working, &predicted, cfg.k, cfg.seeding)?;
    let seed_cost = cost(&working, &seeds)?;

    let (centers, iterations, converged, history, lloyd_time) = if cfg.refine {
        let start = Instant::now();
        let run = lloyd(&working, &seeds, &cfg.lloyd)?;
        let elapsed = start.elapsed();
        let centers = update_centers(x, &run.labels, cfg.k)?;
        (centers, run.iterations, run.converged, run.cost_history, elapsed)
    } else {
        let centers = centers_from_labels(x, &predicted, cfg.k, cfg.seeding)?;
        (centers, 0, true, vec![seed_cost], Duration::ZERO)
    };

    let labels = crate::kmeans::assign(x, &centers)?;
    let final_cost = cost(x, &centers)?;
    Ok(PipelineResult {
        result: ClusteringResult {
            centers,
            labels,
            cost: final_cost,
            iterations,
            converged,
            cost_history: history,
        },
        reduced_dim: model.as_ref().map(PcaModel::retained),
        cost_ratio: None,
        iterations,
        seed_cost,
        lloyd_time,
    })
}

/// `method_cost / baseline_cost`.
pub fn cost_ratio(method_cost: f64, baseline_cost: f64) -> Result<f64> {
    if !(baseline_cost > 0.0) || !baseline_cost.is_finite() {
        return Err(Error::domain(format!("baseline cost {baseline_cost} must be positive")));
    }
    if !(method_cost >= 0.0) || !method_cost.is_finite() {
        return Err(Error::domain(format!("method cost {method_cost} must be non-negative")));
    }
    Ok(method_cost / baseline_cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::synth_gmm;
    use crate::kmeans::best_of_restarts;
    use crate::kmeans::InitMethod;

    fn col(values: &[f64]) -> Matrix {
        Matrix::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn trimmed_mean_examples() {
        let x = Matrix::from_rows(&[[1.0, 5.0], [2.0, -1.0], [7.5, 0.25]]).unwrap();
        assert_eq!(coordinate_trimmed_mean(&x, 0.0).unwrap(), mean_rows(&x).unwrap());
        assert_eq!(coordinate_trimmed_mean(&col(&[0.0, 0.0, 0.0, 100.0]), 0.25).unwrap(), vec![0.0]);
        let c = Matrix::from_rows(&[[3.5, -2.0]; 7]).unwrap();
        for alpha in [0.0, 0.1, 0.3, 0.49] {
            assert_eq!(coordinate_trimmed_mean(&c, alpha).unwrap(), vec![3.5, -2.0]);
        }
    }

    #[test]
    fn trimmed_mean_median_fallback_and_errors() {
        // n = 2, alpha = 0.4 trims one from each end, leaving nothing
        assert_eq!(coordinate_trimmed_mean(&col(&[1.0, 3.0]), 0.4).unwrap(), vec![2.0]);
        assert_eq!(coordinate_trimmed_mean(&col(&[9.0, 1.0, 3.0]), 0.4).unwrap(), vec![3.0]);
        assert!(coordinate_trimmed_mean(&Matrix::zeros(0, 2), 0.1).is_err());
        assert!(coordinate_trimmed_mean(&col(&[1.0]), 0.5).is_err());
        assert!(coordinate_trimmed_mean(&col(&[1.0]), -0.1).is_err());
    }

    #[test]
    fn trim_count_is_not_inflated_by_rounding() {
        // 0.1 * 30 = 3.0000000000000004 in floating point
        let v: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let m = coordinate_trimmed_mean(&col(&v), 0.1).unwrap()[0];
        let expect = (3..27).map(|i| i as f64).sum::<f64>() / 24.0;
        assert_eq!(m, expect);
    }

    #[test]
    fn centers_from_perfect_labels() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [2.0, 0.0], [10.0, 10.0], [12.0, 10.0]]).unwrap();
        let l = Labeling::new(vec![0, 0, 1, 1], 2).unwrap();
        let c = centers_from_labels(&x, &l, 2, SeedingMode::CoordinateMean).unwrap();
        assert_eq!(c.as_matrix().as_slice(), &[1.0, 0.0, 11.0, 10.0]);
    }

    #[test]
    fn trimmed_seeding_resists_outliers() {
        let mut rows: Vec<[f64; 2]> = (0..12).map(|i| [i as f64 / 11.0, 1.0 - i as f64 / 11.0]).collect();
        rows.extend([[500.0, -300.0]; 4]);
        let x = Matrix::from_rows(&rows).unwrap();
        let l = Labeling::new(vec![0; 16], 1).unwrap();
        let c = centers_from_labels(&x, &l, 1, SeedingMode::TrimmedMean { alpha: 0.25 }).unwrap();
        for v in c.center(0) {
            assert!((0.0..=1.0).contains(v), "{v}");
        }
        let plain = centers_from_labels(&x, &l, 1, SeedingMode::CoordinateMean).unwrap();
        assert!(plain.center(0)[0] > 100.0);
    }

    #[test]
    fn missing_class_is_reseeded() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [20.0], [21.0]]).unwrap();
        let l = Labeling::new(vec![0, 0, 0, 1, 1], 3).unwrap();
        let c = centers_from_labels(&x, &l, 3, SeedingMode::CoordinateMean).unwrap();
        // global mean is 8.8; 21 is the farthest point
        assert_eq!(c.center(2), &[21.0]);
        let again = centers_from_labels(&x, &l, 3, SeedingMode::CoordinateMean).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn cost_ratio_examples() {
        assert_eq!(cost_ratio(3.0, 3.0).unwrap(), 1.0);
        assert!((cost_ratio(2.2, 2.0).unwrap() - 1.1).abs() < 1e-15);
        assert_eq!(cost_ratio(0.0, 5.0).unwrap(), 0.0);
        assert!(cost_ratio(1.0, 0.0).is_err());
        assert!(cost_ratio(-1.0, 1.0).is_err());
    }

    fn blobs(seed: u64) -> (Matrix, Labeling) {
        let ds = synth_gmm(3, 20, 4, 15.0, 1.0, seed).unwrap();
        (ds.points, ds.labels.unwrap())
    }

    #[test]
    fn oracle_labels_without_refinement_give_partition_cost() {
        let (x, truth) = blobs(1);
        let p = Predictor::FileOracle { labels: truth.clone() };
        let cfg = PipelineConfig {
            refine: false,
            ..PipelineConfig::new(3)
        };
        let r = predictor_clustering(&x, &p, &cfg).unwrap();
        let centers = update_centers(&x, &truth, 3).unwrap();
        let partition_cost: f64 = x
            .row_iter()
            .zip(truth.as_slice())
            .map(|(row, &l)| sq_dist(row, centers.center(l)))
            .sum();
        assert!((r.result.cost - partition_cost).abs() <= 1e-9 * partition_cost);
        assert!(r.result.labels.same_partition(&truth));
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn refinement_never_hurts() {
        let (x, _) = blobs(2);
        let base = best_of_restarts(&x, 3, 3, &LloydConfig::default(), InitMethod::KMeansPlusPlus)
            .unwrap()
            .labels;
        for rate in [0.0, 0.3, 0.8] {
            let p = Predictor::noisy(base.clone(), rate, 9).unwrap();
            let r = predictor_clustering(&x, &p, &PipelineConfig::new(3)).unwrap();
            assert!(r.result.cost <= r.seed_cost + 1e-9 * r.seed_cost.max(1.0));
            let seed_only = predictor_clustering(&x, &p, &PipelineConfig { refine: false, ..PipelineConfig::new(3) })
                .unwrap();
            assert!(r.result.cost <= seed_only.result.cost + 1e-9 * seed_only.result.cost);
        }
    }

    #[test]
    fn full_retention_pca_keeps_partition() {
        for seed in 0..5 {
            let (x, truth) = blobs(10 + seed);
            let p = Predictor::noisy(truth, 0.6, seed).unwrap();
            let plain = predictor_clustering(&x, &p, &PipelineConfig::new(3)).unwrap();
            let cfg = PipelineConfig {
                pca: Some(PcaPolicy::FixedDim(x.cols())),
                ..PipelineConfig::new(3)
            };
            let rotated = predictor_clustering(&x, &p, &cfg).unwrap();
            assert_eq!(rotated.reduced_dim, Some(x.cols()));
            assert!(plain.result.labels.same_partition(&rotated.result.labels));
        }
    }

    #[test]
    fn nn_predictor_is_projected_into_reduced_space() {
        let (x, truth) = blobs(4);
        let p = Predictor::nearest_neighbor(x.clone(), truth.clone()).unwrap();
        let cfg = PipelineConfig {
            pca: Some(PcaPolicy::FixedDim(2)),
            refine: false,
            ..PipelineConfig::new(3)
        };
        let r = predictor_clustering(&x, &p, &cfg).unwrap();
        assert_eq!(r.reduced_dim, Some(2));
        assert!(r.result.labels.same_partition(&truth));
    }

    #[test]
    fn pipeline_rejects_bad_input() {
        let (x, truth) = blobs(5);
        let p = Predictor::FileOracle { labels: truth };
        assert!(predictor_clustering(&x, &p, &PipelineConfig::new(0)).is_err());
        assert!(predictor_clustering(&x, &p, &PipelineConfig::new(2)).is_err());
        let short = x.select_rows(&[0, 1, 2, 3]);
        assert!(predictor_clustering(&short, &p, &PipelineConfig::new(3)).is_err());
        let cfg = PipelineConfig {
            seeding: SeedingMode::TrimmedMean { alpha: 0.7 },
            ..PipelineConfig::new(3)
        };
        assert!(predictor_clustering(&x, &p, &cfg).is_err());
    }

    #[test]
    fn pipeline_is_deterministic() {
        let (x, truth) = blobs(6);
        let p = Predictor::noisy(truth, 0.5, 3).unwrap();
        let cfg = PipelineConfig {
            pca: Some(PcaPolicy::EvrThreshold(0.9)),
            seeding: SeedingMode::trimmed(),
            ..PipelineConfig::new(3)
        };
        let a = predictor_clustering(&x, &p, &cfg).unwrap();
        let b = predictor_clustering(&x, &p, &cfg).unwrap();
        assert_eq!(a.result.labels, b.result.labels);
        assert_eq!(a.result.cost.to_bits(), b.result.cost.to_bits());
    }
}
