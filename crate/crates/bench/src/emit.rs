use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::experiment::{ExperimentResult, RESULT_SCHEMA_VERSION};

pub const CSV_COLUMNS: [&str; 13] = [
    "schema_version",
    "rate_index",
    "error_rate",
    "trial",
    "variant",
    "seed",
    "method_cost",
    "baseline_cost",
    "cost_ratio",
    "iterations",
    "reduced_dim",
    "wall_time_s",
    "lloyd_time_per_iter_s",
];

/// Columns that depend on the machine and are excluded from determinism checks.
pub const TIMING_COLUMNS: [&str; 2] = ["wall_time_s", "lloyd_time_per_iter_s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    /// `json` for a `.json` extension, otherwise `csv`.
    pub fn from_extension(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(BenchError::config(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Header plus one row per `(rate, trial, variant)` cell. Floats use the
/// shortest representation that parses back to the same value.
pub fn write_csv<W: Write>(res: &ExperimentResult, mut out: W) -> Result<()> {
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for c in &res.cells {
        writeln!(
            out,
            "{},{},{:?},{},{},{},{:?},{:?},{:?},{},{},{:?},{:?}",
            RESULT_SCHEMA_VERSION,
            c.rate_index,
            c.error_rate,
            c.trial,
            c.variant.as_str(),
            c.seed,
            c.method_cost,
            c.baseline_cost,
            c.cost_ratio,
            c.iterations,
            c.reduced_dim,
            c.wall_time_s,
            c.lloyd_time_per_iter_s,
        )?;
    }
    Ok(())
}

pub fn to_json(res: &ExperimentResult) -> Result<String> {
    let mut s = serde_json::to_string_pretty(res)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(s: &str) -> Result<ExperimentResult> {
    let res: ExperimentResult = serde_json::from_str(s)?;
    if res.schema_version != RESULT_SCHEMA_VERSION {
        return Err(BenchError::config(format!(
            "unsupported result schema version {}",
            res.schema_version
        )));
    }
    Ok(res)
}

pub fn emit_results(res: &ExperimentResult, format: Format, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        Format::Csv => write_csv(res, &mut file)?,
        Format::Json => file.write_all(to_json(res)?.as_bytes())?,
    }
    file.flush()?;
    Ok(())
}
