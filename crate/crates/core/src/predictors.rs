//! Label predictors: procedures that emit a cluster id for every point before
//! clustering starts.

use std::path::Path;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::kmeans::Labeling;
use crate::matrix::{sq_dist, Matrix};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    /// Label of the closest reference point; ties go to the lower reference index.
    NearestNeighbor {
        reference_points: Matrix,
        reference_labels: Labeling,
    },
    /// Base labels with each entry independently replaced, with probability
    /// `error_rate`, by a uniform draw over all `k` ids.
    Noisy {
        base_labels: Labeling,
        error_rate: f64,
        seed: u64,
    },
    /// Labels produced elsewhere, e.g. by an image classifier.
    FileOracle { labels: Labeling },
}

impl Predictor {
    pub fn nearest_neighbor(reference_points: Matrix, reference_labels: Labeling) -> Result<Self> {
        if reference_points.rows() == 0 {
            return Err(Error::domain("nearest-neighbor predictor needs reference points"));
        }
        if reference_points.rows() != reference_labels.len() {
            return Err(Error::domain(format!(
                "{} reference points but {} labels",
                reference_points.rows(),
                reference_labels.len()
            )));
        }
        Ok(Predictor::NearestNeighbor {
            reference_points,
            reference_labels,
        })
    }

    pub fn noisy(base_labels: Labeling, error_rate: f64, seed: u64) -> Result<Self> {
        check_rate(error_rate)?;
        Ok(Predictor::Noisy {
            base_labels,
            error_rate,
            seed,
        })
    }

    pub fn file_oracle(path: impl AsRef<Path>, expected_n: usize, k: usize) -> Result<Self> {
        Ok(Predictor::FileOracle {
            labels: load_label_file(path, expected_n, k)?,
        })
    }

    /// Number of cluster ids this predictor can emit.
    pub fn k(&self) -> usize {
        match self {
            Predictor::NearestNeighbor { reference_labels, .. } => reference_labels.k(),
            Predictor::Noisy { base_labels, .. } => base_labels.k(),
            Predictor::FileOracle { labels } => labels.k(),
        }
    }

    /// True for predictors whose output depends on point coordinates.
    pub fn is_geometric(&self) -> bool {
        matches!(self, Predictor::NearestNeighbor { .. })
    }

    pub fn predict(&self, x: &Matrix) -> Result<Labeling> {
        match self {
            Predictor::NearestNeighbor {
                reference_points,
                reference_labels,
            } => {
                if x.cols() != reference_points.cols() {
                    return Err(Error::domain(format!(
                        "queries have {} columns, references have {}",
                        x.cols(),
                        reference_points.cols()
                    )));
                }
                let ids = x
                    .row_iter()
                    .map(|q| reference_labels.as_slice()[nearest_row(reference_points, q)])
                    .collect();
                Labeling::new(ids, reference_labels.k())
            }
            Predictor::Noisy {
                base_labels,
                error_rate,
                seed,
            } => {
                check_len(x, base_labels.len())?;
                noisy_labels(base_labels, *error_rate, base_labels.k(), *seed)
            }
            Predictor::FileOracle { labels } => {
                check_len(x, labels.len())?;
                Ok(labels.clone())
            }
        }
    }
}

fn check_len(x: &Matrix, n: usize) -> Result<()> {
    if x.rows() != n {
        return Err(Error::domain(format!(
            "predictor holds {n} labels but data has {} rows",
            x.rows()
        )));
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::domain(format!("error rate {rate} is outside [0, 1]")));
    }
    Ok(())
}

fn nearest_row(refs: &Matrix, q: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, r) in refs.row_iter().enumerate() {
        let d = sq_dist(r, q);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Corrupt `base`: each index independently, with probability `error_rate`,
/// gets a uniform label from `0..k` (possibly its original one).
///
/// Per index, one uniform `f64` is drawn for the corruption decision and, only
/// when corrupted, one uniform integer for the replacement.
pub fn noisy_labels(base: &Labeling, error_rate: f64, k: usize, seed: u64) -> Result<Labeling> {
    check_rate(error_rate)?;
    if k == 0 || base.as_slice().iter().any(|&l| l >= k) {
        return Err(Error::domain(format!("base labels must be below k = {k}")));
    }
    let mut rng = rng_from_seed(seed);
    let out = base
        .as_slice()
        .iter()
        .map(|&l| {
            if rng.random::<f64>() < error_rate {
                rng.random_range(0..k)
            } else {
                l
            }
        })
        .collect();
    Labeling::new(out, k)
}

/// Read a label file: one base-10 integer per line, LF or CRLF endings, an
/// optional trailing newline, and no blank lines.
pub fn load_label_file(path: impl AsRef<Path>, expected_n: usize, k: usize) -> Result<Labeling> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_labels(path, &text, expected_n, k)
}

fn parse_labels(path: &Path, text: &str, expected_n: usize, k: usize) -> Result<Labeling> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut labels = Vec::new();
    if !body.is_empty() {
        for (i, line) in body.split('\n').enumerate() {
            let line_no = i + 1;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                return Err(Error::at_line(path, line_no, "empty line"));
            }
            let id: usize = line
                .parse()
                .map_err(|_| Error::at_line(path, line_no, format!("'{line}' is not a label")))?;
            if id >= k {
                return Err(Error::at_line(
                    path,
                    line_no,
                    format!("label {id} is not below k = {k}"),
                ));
            }
            labels.push(id);
        }
    }
    if labels.len() != expected_n {
        return Err(Error::at_line(
            path,
            labels.len() + 1,
            format!("expected {expected_n} labels, found {}", labels.len()),
        ));
    }
    Labeling::new(labels, k)
}

/// Write labels in the format read by [`load_label_file`].
pub fn write_label_file(path: impl AsRef<Path>, labels: &Labeling) -> Result<()> {
    let mut s = String::with_capacity(labels.len() * 3);
    for l in labels.as_slice() {
        s.push_str(&l.to_string());
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}
