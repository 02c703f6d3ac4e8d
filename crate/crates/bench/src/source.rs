//! Dataset source specifications.
//!
//! | spec | meaning |
//! |------|---------|
//! | `csv:PATH` or a bare path | numeric CSV, no header |
//! | `csv-header:PATH` | numeric CSV with one header row |
//! | `cifar:PATH` | CIFAR-10 binary batch, pixels scaled to `[0, 1]` |
//! | `cifar-raw:PATH` | CIFAR-10 binary batch, raw byte values |
//! | `edges:PATH[,dim=D]` | edge list, spectral embedding in `D` dimensions (default 2) |
//! | `synth:k=K,n=N,dim=D,sep=S,sigma=σ[,seed=SEED]` | Gaussian mixture, `N` points per blob |

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use lakm_core::datasets::{load_cifar10_with, load_csv, load_edge_list, spectral_embed, synth_gmm, LabeledDataset, PixelScale};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{BenchError, Result};

pub const DEFAULT_EMBED_DIM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Csv { path: PathBuf, has_header: bool },
    Cifar { path: PathBuf, scale: PixelScale },
    Edges { path: PathBuf, dim: usize },
    Synth(SynthParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub k: usize,
    pub n_per: usize,
    pub dim: usize,
    pub separation: f64,
    pub sigma: f64,
    /// When absent the experiment derives one from its master seed.
    pub seed: Option<u64>,
}

impl DatasetSource {
    /// Load the dataset; `fallback_seed` is used by synthetic sources without
    /// an explicit seed.
    pub fn load(&self, fallback_seed: u64) -> Result<LabeledDataset> {
        let ds = match self {
            DatasetSource::Csv { path, has_header } => {
                let points = load_csv(path, *has_header)?;
                LabeledDataset::new(points, None, file_name(path), path.display().to_string())?
            }
            DatasetSource::Cifar { path, scale } => load_cifar10_with(path, *scale)?,
            DatasetSource::Edges { path, dim } => {
                let g = load_edge_list(path)?;
                let points = spectral_embed(&g, *dim)?;
                LabeledDataset::new(
                    points,
                    None,
                    file_name(path),
                    format!("{} (spectral embedding, dim {dim})", path.display()),
                )?
            }
            DatasetSource::Synth(p) => synth_gmm(
                p.k,
                p.n_per,
                p.dim,
                p.separation,
                p.sigma,
                p.seed.unwrap_or(fallback_seed),
            )?,
        };
        Ok(ds)
    }
}

fn file_name(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

impl fmt::Display for DatasetSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetSource::Csv { path, has_header: false } => write!(f, "csv:{}", path.display()),
            DatasetSource::Csv { path, has_header: true } => write!(f, "csv-header:{}", path.display()),
            DatasetSource::Cifar { path, scale: PixelScale::Unit } => write!(f, "cifar:{}", path.display()),
            DatasetSource::Cifar { path, scale: PixelScale::Raw } => write!(f, "cifar-raw:{}", path.display()),
            DatasetSource::Edges { path, dim } => write!(f, "edges:{},dim={dim}", path.display()),
            DatasetSource::Synth(p) => {
                write!(f, "synth:k={},n={},dim={},sep={},sigma={}", p.k, p.n_per, p.dim, p.separation, p.sigma)?;
                if let Some(seed) = p.seed {
                    write!(f, ",seed={seed}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for DatasetSource {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(BenchError::config("empty dataset spec"));
        }
        let Some((kind, rest)) = s.split_once(':') else {
            return Ok(DatasetSource::Csv { path: s.into(), has_header: false });
        };
        match kind {
            "csv" => Ok(DatasetSource::Csv { path: rest.into(), has_header: false }),
            "csv-header" => Ok(DatasetSource::Csv { path: rest.into(), has_header: true }),
            "cifar" => Ok(DatasetSource::Cifar { path: rest.into(), scale: PixelScale::Unit }),
            "cifar-raw" => Ok(DatasetSource::Cifar { path: rest.into(), scale: PixelScale::Raw }),
            "edges" => match rest.rsplit_once(",dim=") {
                Some((path, dim)) => Ok(DatasetSource::Edges {
                    path: path.into(),
                    dim: parse_field("dim", dim)?,
                }),
                None => Ok(DatasetSource::Edges { path: rest.into(), dim: DEFAULT_EMBED_DIM }),
            },
            "synth" => parse_synth(rest).map(DatasetSource::Synth),
            // Windows drive letters and other colon-bearing paths.
            _ => Ok(DatasetSource::Csv { path: s.into(), has_header: false }),
        }
    }
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| BenchError::config(format!("invalid value {value:?} for dataset parameter {key}")))
}

fn parse_synth(params: &str) -> Result<SynthParams> {
    let (mut k, mut n, mut dim, mut sep, mut sigma, mut seed) = (None, None, None, None, None, None);
    for part in params.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| BenchError::config(format!("synthetic parameter {part:?} is not key=value")))?;
        match key.trim() {
            "k" => k = Some(parse_field(key, value)?),
            "n" | "n_per" => n = Some(parse_field(key, value)?),
            "dim" | "d" => dim = Some(parse_field(key, value)?),
            "sep" | "separation" => sep = Some(parse_field(key, value)?),
            "sigma" => sigma = Some(parse_field(key, value)?),
            "seed" => seed = Some(parse_field(key, value)?),
            other => return Err(BenchError::config(format!("unknown synthetic parameter {other:?}"))),
        }
    }
    let need = |name: &str| BenchError::config(format!("synthetic dataset needs {name}="));
    Ok(SynthParams {
        k: k.ok_or_else(|| need("k"))?,
        n_per: n.ok_or_else(|| need("n"))?,
        dim: dim.ok_or_else(|| need("dim"))?,
        separation: sep.ok_or_else(|| need("sep"))?,
        sigma: sigma.ok_or_else(|| need("sigma"))?,
        seed,
    })
}

impl Serialize for DatasetSource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DatasetSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
