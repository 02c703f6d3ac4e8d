//! Principal component analysis through the eigendecomposition of the
//! scatter matrix of centered data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{center, mean_rows, scatter, sym_eigen, Matrix};

/// How many principal components to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaPolicy {
    /// Keep exactly this many components.
    FixedDim(usize),
    /// Keep the smallest prefix whose cumulative explained variance reaches
    /// the threshold, in `(0, 1]`.
    EvrThreshold(f64),
}

impl PcaPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PcaPolicy::FixedDim(0) => Err(Error::Config("PCA dimension must be at least 1".into())),
            PcaPolicy::EvrThreshold(t) if !(t > 0.0 && t <= 1.0) => Err(Error::Config(format!(
                "explained-variance threshold {t} is outside (0, 1]"
            ))),
            _ => Ok(()),
        }
    }
}

impl Default for PcaPolicy {
    fn default() -> Self {
        PcaPolicy::EvrThreshold(0.95)
    }
}

/// Cumulative ratios are compared against thresholds with this slack so a
/// threshold of exactly 1.0 is reachable despite rounding.
const CUMULATIVE_SLACK: f64 = 1e-12;
/// Columns whose standard deviation falls below this are left unscaled.
const MIN_SCALE: f64 = 1e-12;

/// A fitted PCA transform.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    scale: Option<Vec<f64>>,
    components: Matrix,
    eigenvalues: Vec<f64>,
    evr: Vec<f64>,
    degenerate: bool,
}

impl PcaModel {
    /// Fit on the rows of `x` with centering only.
    pub fn fit(x: &Matrix, policy: PcaPolicy) -> Result<Self> {
        Self::fit_with(x, policy, false)
    }

    /// Fit on the rows of `x`; with `standardize`, each column is also divided
    /// by its sample standard deviation before the eigendecomposition.
    pub fn fit_with(x: &Matrix, policy: PcaPolicy, standardize: bool) -> Result<Self> {
        policy.validate().map_err(|e| match e {
            Error::Config(m) => Error::Domain(m),
            e => e,
        })?;
        if x.rows() < 2 {
            return Err(Error::domain("PCA needs at least two rows"));
        }
        let d = x.cols();
        if d == 0 {
            return Err(Error::domain("PCA needs at least one column"));
        }
        if let PcaPolicy::FixedDim(r) = policy {
            if r > d {
                return Err(Error::domain(format!(
                    "cannot keep {r} components of {d}-dimensional data"
                )));
            }
        }

        let mean = mean_rows(x)?;
        let mut xc = center(x, &mean)?;
        let scale = if standardize {
            let s = column_std(&xc);
            xc = divide_columns(&xc, &s)?;
            Some(s)
        } else {
            None
        };

        let pairs = sym_eigen(&scatter(&xc)?)?;
        let eigenvalues = pairs.eigenvalues;
        let total: f64 = eigenvalues.iter().map(|l| l.max(0.0)).sum();
        let degenerate = !(total > 0.0);

        let (evr, retained, basis) = if degenerate {
            match policy {
                PcaPolicy::EvrThreshold(_) => {
                    return Err(Error::Degenerate(
                        "total variance is zero, no component explains anything".into(),
                    ))
                }
                PcaPolicy::FixedDim(r) => (vec![0.0; d], r, Matrix::identity(d)),
            }
        } else {
            let evr: Vec<f64> = eigenvalues.iter().map(|l| l.max(0.0) / total).collect();
            let r = match policy {
                PcaPolicy::FixedDim(r) => r,
                PcaPolicy::EvrThreshold(t) => {
                    let mut cum = 0.0;
                    let mut r = d;
                    for (i, e) in evr.iter().enumerate() {
                        cum += e;
                        if cum >= t - CUMULATIVE_SLACK {
                            r = i + 1;
                            break;
                        }
                    }
                    r
                }
            };
            (evr, r, pairs.eigenvectors)
        };

        let mut comp = Vec::with_capacity(d * retained);
        for i in 0..d {
            comp.extend_from_slice(&basis.row(i)[..retained]);
        }
        Ok(PcaModel {
            mean,
            scale,
            components: Matrix::new(d, retained, comp)?,
            eigenvalues,
            evr,
            degenerate,
        })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Per-column scale applied after centering, when fitted with standardization.
    pub fn scale(&self) -> Option<&[f64]> {
        self.scale.as_deref()
    }

    /// `d × r` matrix whose columns are the retained principal directions.
    pub fn components(&self) -> &Matrix {
        &self.components
    }

    /// All `d` eigenvalues of the scatter matrix, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.evr
    }

    pub fn retained(&self) -> usize {
        self.components.cols()
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    /// True when the training data had zero total variance; components are
    /// then the leading canonical axes.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Project rows of `x` onto the retained components.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim() {
            return Err(Error::domain(format!(
                "model expects {} columns, got {}",
                self.input_dim(),
                x.cols()
            )));
        }
        let mut xc = center(x, &self.mean)?;
        if let Some(s) = &self.scale {
            xc = divide_columns(&xc, s)?;
        }
        xc.matmul(&self.components)
    }

    /// Map reduced coordinates back into the input space.
    pub fn inverse_transform(&self, z: &Matrix) -> Result<Matrix> {
        if z.cols() != self.retained() {
            return Err(Error::domain(format!(
                "model has {} components, got {} columns",
                self.retained(),
                z.cols()
            )));
        }
        let back = z.matmul(&self.components.transpose())?;
        let mut data = back.into_vec();
        let d = self.input_dim();
        for row in data.chunks_exact_mut(d) {
            for (j, v) in row.iter_mut().enumerate() {
                if let Some(s) = &self.scale {
                    *v *= s[j];
                }
                *v += self.mean[j];
            }
        }
        Matrix::new(z.rows(), d, data)
    }

    pub fn to_document(&self) -> PcaDocument {
        PcaDocument {
            schema_version: PCA_SCHEMA_VERSION,
            dim: self.input_dim(),
            retained: self.retained(),
            mean: self.mean.clone(),
            scale: self.scale.clone(),
            eigenvalues: self.eigenvalues.clone(),
            explained_variance_ratio: self.evr.clone(),
            components: self.components.as_slice().to_vec(),
            degenerate: self.degenerate,
        }
    }

    pub fn from_document(doc: PcaDocument) -> Result<Self> {
        if doc.schema_version != PCA_SCHEMA_VERSION {
            return Err(Error::domain(format!(
                "unsupported PCA model schema version {}",
                doc.schema_version
            )));
        }
        let d = doc.dim;
        if doc.mean.len() != d
            || doc.eigenvalues.len() != d
            || doc.explained_variance_ratio.len() != d
            || doc.scale.as_ref().is_some_and(|s| s.len() != d)
            || doc.retained == 0
            || doc.retained > d
        {
            return Err(Error::domain("inconsistent PCA model document"));
        }
        Ok(PcaModel {
            mean: doc.mean,
            scale: doc.scale,
            components: Matrix::new(d, doc.retained, doc.components)?,
            eigenvalues: doc.eigenvalues,
            evr: doc.explained_variance_ratio,
            degenerate: doc.degenerate,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(s)?)
    }
}

pub const PCA_SCHEMA_VERSION: u32 = 1;

/// Serialized form of a [`PcaModel`]; `components` is row-major `dim × retained`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaDocument {
    pub schema_version: u32,
    pub dim: usize,
    pub retained: usize,
    pub mean: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub components: Vec<f64>,
    #[serde(default)]
    pub degenerate: bool,
}

/// `λᵢ / Σλ` for a descending eigenvalue list; all zeros when the sum is zero.
pub fn explained_variance_ratio(eigenvalues: &[f64]) -> Vec<f64> {
    let total: f64 = eigenvalues.iter().map(|l| l.max(0.0)).sum();
    if total > 0.0 {
        eigenvalues.iter().map(|l| l.max(0.0) / total).collect()
    } else {
        vec![0.0; eigenvalues.len()]
    }
}

fn column_std(xc: &Matrix) -> Vec<f64> {
    let n = xc.rows();
    let mut ss = vec![0.0; xc.cols()];
    for row in xc.row_iter() {
        for (s, v) in ss.iter_mut().zip(row) {
            *s += v * v;
        }
    }
    let denom = (n.max(2) - 1) as f64;
    ss.into_iter()
        .map(|s| {
            let sd = (s / denom).sqrt();
            if sd < MIN_SCALE {
                1.0
            } else {
                sd
            }
        })
        .collect()
}

fn divide_columns(x: &Matrix, s: &[f64]) -> Result<Matrix> {
    let d = x.cols();
    let mut data = x.as_slice().to_vec();
    for row in data.chunks_exact_mut(d.max(1)) {
        for (v, sj) in row.iter_mut().zip(s) {
            *v /= sj;
        }
    }
    Matrix::new(x.rows(), d, data)
}
