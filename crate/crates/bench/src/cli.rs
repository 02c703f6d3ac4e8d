//! The `lakm` command line.
//!
//! Exit status is 0 on success, 1 for usage and configuration errors and 2
//! when the data cannot be read or clustered.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lakm_core::datasets::{write_csv, LabeledDataset};
use lakm_core::kmeans::best_of_restarts;
use lakm_core::predictors::write_label_file;
use lakm_core::{InitMethod, LloydConfig, PcaModel, PcaPolicy, SeedingMode};
use serde::Deserialize;

use crate::config::{ExperimentConfig, Subsample};
use crate::emit::{emit_results, to_json, write_csv as write_result_csv, Format};
use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, ExperimentResult};
use crate::source::DatasetSource;

#[derive(Debug, Parser)]
#[command(name = "lakm", version, about = "Learning-augmented k-means benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep label-corruption rates and record clustering cost ratios.
    Run(RunArgs),
    /// Fit PCA to a dataset and print the explained-variance table.
    Pca(PcaArgs),
    /// Plain k-means++ clustering of a dataset.
    Kmeans(KmeansArgs),
    /// Print dataset statistics.
    Inspect(InspectArgs),
}

/// Flags of `run`. A config file uses the same names as keys.
#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct RunArgs {
    /// TOML file with flag names as keys; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Dataset spec: csv:PATH, csv-header:PATH, cifar:PATH, cifar-raw:PATH,
    /// edges:PATH[,dim=D] or synth:k=K,n=N,dim=D,sep=S,sigma=S[,seed=S].
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// Keep this many principal components.
    #[arg(long, conflicts_with_all = ["pca_evr", "no_pca"])]
    pca_dim: Option<usize>,
    /// Keep components up to this cumulative explained-variance ratio
    /// (default 0.95).
    #[arg(long, conflicts_with = "no_pca")]
    pca_evr: Option<f64>,
    /// Cluster in the original space.
    #[arg(long)]
    #[serde(default)]
    no_pca: bool,
    /// Standardize columns before PCA.
    #[arg(long)]
    #[serde(default)]
    standardize: bool,
    /// Comma-separated ascending error rates.
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed centers with a coordinate-wise trimmed mean.
    #[arg(long)]
    trim_alpha: Option<f64>,
    /// Restarts of the k-means++ baseline.
    #[arg(long)]
    restarts: Option<usize>,
    /// Cluster a uniform sample of this many rows.
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long, requires = "subsample")]
    subsample_seed: Option<u64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Emit only the seed-only variant.
    #[arg(long)]
    #[serde(default)]
    no_refine: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; defaults to the extension of --out.
    #[arg(long)]
    format: Option<Format>,
}

impl RunArgs {
    fn merged_with(self, file: RunArgs) -> RunArgs {
        let flag_pca = self.pca_dim.is_some() || self.pca_evr.is_some() || self.no_pca;
        RunArgs {
            config: self.config,
            data: self.data.or(file.data),
            k: self.k.or(file.k),
            pca_dim: if flag_pca { self.pca_dim } else { file.pca_dim },
            pca_evr: if flag_pca { self.pca_evr } else { file.pca_evr },
            no_pca: if flag_pca { self.no_pca } else { file.no_pca },
            standardize: self.standardize || file.standardize,
            rates: self.rates.or(file.rates),
            trials: self.trials.or(file.trials),
            seed: self.seed.or(file.seed),
            trim_alpha: self.trim_alpha.or(file.trim_alpha),
            restarts: self.restarts.or(file.restarts),
            subsample: self.subsample.or(file.subsample),
            subsample_seed: self.subsample_seed.or(file.subsample_seed),
            max_iters: self.max_iters.or(file.max_iters),
            tol: self.tol.or(file.tol),
            no_refine: self.no_refine || file.no_refine,
            out: self.out.or(file.out),
            format: self.format.or(file.format),
        }
    }

    fn experiment(&self) -> Result<ExperimentConfig> {
        let k = self.k.ok_or_else(|| BenchError::config("k is required (--k)"))?;
        if k == 0 {
            return Err(BenchError::config("k must be at least 1"));
        }
        let data = self
            .data
            .as_deref()
            .ok_or_else(|| BenchError::config("a dataset is required (--data)"))?;
        let mut cfg = ExperimentConfig::new(data.parse()?, k);
        if self.no_pca {
            if self.pca_dim.is_some() || self.pca_evr.is_some() {
                return Err(BenchError::config("no-pca cannot be combined with pca-dim or pca-evr"));
            }
            cfg.pca = None;
        } else if let Some(p) = pca_policy(self.pca_dim, self.pca_evr)? {
            cfg.pca = Some(p);
        }
        cfg.standardize = self.standardize;
        if let Some(r) = &self.rates {
            cfg.error_rates = r.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(alpha) = self.trim_alpha {
            cfg.seeding = SeedingMode::TrimmedMean { alpha };
        }
        if let Some(r) = self.restarts {
            cfg.baseline_restarts = r;
        }
        cfg.subsample = self.subsample.map(|count| Subsample {
            count,
            seed: self.subsample_seed.unwrap_or(cfg.master_seed),
        });
        cfg.lloyd = lloyd_config(self.max_iters, self.tol, cfg.master_seed);
        cfg.refine = !self.no_refine;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct PcaArgs {
    #[arg(long)]
    data: String,
    #[arg(long, conflicts_with = "pca_evr")]
    pca_dim: Option<usize>,
    /// Defaults to 0.95 when no dimension is given.
    #[arg(long)]
    pca_evr: Option<f64>,
    #[arg(long)]
    standardize: bool,
    /// Write the fitted model as JSON.
    #[arg(long)]
    save: Option<PathBuf>,
    /// Write the projected points as CSV.
    #[arg(long)]
    transform: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Init {
    #[value(name = "kmeans++")]
    KMeansPlusPlus,
    Random,
}

#[derive(Debug, Args)]
struct KmeansArgs {
    #[arg(long)]
    data: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, value_enum, default_value_t = Init::KMeansPlusPlus)]
    init: Init,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write one label per line.
    #[arg(long)]
    labels_out: Option<PathBuf>,
    /// Write the centers as CSV.
    #[arg(long)]
    centers_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    data: String,
    /// Number of leading columns to summarize.
    #[arg(long, default_value_t = 10)]
    columns: usize,
    /// Seed for synthetic sources.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn pca_policy(dim: Option<usize>, evr: Option<f64>) -> Result<Option<PcaPolicy>> {
    let policy = match (dim, evr) {
        (Some(_), Some(_)) => return Err(BenchError::config("pca-dim and pca-evr are mutually exclusive")),
        (Some(d), None) => Some(PcaPolicy::FixedDim(d)),
        (None, Some(t)) => Some(PcaPolicy::EvrThreshold(t)),
        (None, None) => None,
    };
    if let Some(p) = &policy {
        p.validate().map_err(|e| BenchError::config(format!("pca: {e}")))?;
    }
    Ok(policy)
}

fn lloyd_config(max_iters: Option<usize>, tol: Option<f64>, seed: u64) -> LloydConfig {
    let d = LloydConfig::default();
    LloydConfig {
        max_iters: max_iters.unwrap_or(d.max_iters),
        tol: tol.unwrap_or(d.tol),
        seed,
    }
}

fn load(data: &str, seed: u64) -> Result<LabeledDataset> {
    data.parse::<DatasetSource>()?.load(seed)
}

/// Run the CLI with `args` (including the program name) and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a, &mut stdout.lock()),
        Command::Pca(a) => cmd_pca(a, &mut stdout.lock()),
        Command::Kmeans(a) => cmd_kmeans(a, &mut stdout.lock()),
        Command::Inspect(a) => cmd_inspect(a, &mut stdout.lock()),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn cmd_run(args: RunArgs, out: &mut impl Write) -> Result<()> {
    let args = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| BenchError::config(format!("cannot read {}: {e}", path.display())))?;
            let file: RunArgs = toml::from_str(&text)?;
            args.merged_with(file)
        }
        None => args,
    };
    let cfg = args.experiment()?;
    let res = run_experiment(&cfg)?;
    match &args.out {
        Some(path) => {
            let format = args.format.unwrap_or_else(|| Format::from_extension(path));
            emit_results(&res, format, path)?;
            print_summary(&res, out)?;
            writeln!(out, "wrote {} rows to {}", res.cells.len(), path.display())?;
        }
        None => match args.format.unwrap_or_default() {
            Format::Csv => write_result_csv(&res, out)?,
            Format::Json => out.write_all(to_json(&res)?.as_bytes())?,
        },
    }
    Ok(())
}

fn print_summary(res: &ExperimentResult, out: &mut impl Write) -> Result<()> {
    writeln!(
        out,
        "{}: {} points, dim {}, k = {}, baseline cost {:.6e}",
        res.dataset.name, res.dataset.points, res.dataset.dim, res.config.k, res.baseline_cost
    )?;
    let variants = res.variants();
    write!(out, "{:>6}", "rate")?;
    for v in variants {
        write!(out, " {:>10}", v.as_str())?;
    }
    writeln!(out)?;
    let means: Vec<Vec<f64>> = variants.iter().map(|&v| res.mean_ratios(v)).collect();
    for (ri, rate) in res.config.error_rates.iter().enumerate() {
        write!(out, "{rate:>6.2}")?;
        for m in &means {
            write!(out, " {:>10.4}", m[ri])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn cmd_pca(args: PcaArgs, out: &mut impl Write) -> Result<()> {
    let policy = pca_policy(args.pca_dim, args.pca_evr)?.unwrap_or_default();
    let ds = load(&args.data, 0)?;
    let model = PcaModel::fit_with(&ds.points, policy, args.standardize)?;
    writeln!(out, "component  eigenvalue            evr       cumulative  kept")?;
    let mut cum = 0.0;
    for (i, (l, e)) in model.eigenvalues().iter().zip(model.explained_variance_ratio()).enumerate() {
        cum += e;
        let kept = if i < model.retained() { "*" } else { "" };
        writeln!(out, "{:>9}  {:<20.12e}  {:.6}  {:.6}    {kept}", i + 1, l, e, cum)?;
    }
    writeln!(out, "retained {} of {} components", model.retained(), model.input_dim())?;
    if let Some(path) = &args.save {
        std::fs::write(path, model.to_json()?)?;
    }
    if let Some(path) = &args.transform {
        write_csv(path, &model.transform(&ds.points)?, None)?;
    }
    Ok(())
}

fn cmd_kmeans(args: KmeansArgs, out: &mut impl Write) -> Result<()> {
    if args.k == 0 {
        return Err(BenchError::config("k must be at least 1"));
    }
    if args.restarts == 0 {
        return Err(BenchError::config("restarts must be at least 1"));
    }
    let cfg = lloyd_config(args.max_iters, args.tol, args.seed);
    cfg.validate()?;
    let ds = load(&args.data, args.seed)?;
    if args.k > ds.points.rows() {
        return Err(BenchError::config(format!("k = {} exceeds the {} points", args.k, ds.points.rows())));
    }
    let init = match args.init {
        Init::KMeansPlusPlus => InitMethod::KMeansPlusPlus,
        Init::Random => InitMethod::RandomRows,
    };
    let res = best_of_restarts(&ds.points, args.k, args.restarts, &cfg, init)?;
    writeln!(out, "cost {:?}", res.cost)?;
    writeln!(out, "iterations {}", res.iterations)?;
    writeln!(out, "converged {}", res.converged)?;
    let sizes: Vec<String> = res.labels.counts().iter().map(usize::to_string).collect();
    writeln!(out, "sizes {}", sizes.join(" "))?;
    if let Some(path) = &args.labels_out {
        write_label_file(path, &res.labels)?;
    }
    if let Some(path) = &args.centers_out {
        write_csv(path, res.centers.as_matrix(), None)?;
    }
    Ok(())
}

fn cmd_inspect(args: InspectArgs, out: &mut impl Write) -> Result<()> {
    let ds = load(&args.data, args.seed)?;
    let x = &ds.points;
    writeln!(out, "name {}", ds.name)?;
    writeln!(out, "source {}", ds.provenance)?;
    writeln!(out, "points {}", x.rows())?;
    writeln!(out, "dim {}", x.cols())?;
    if let Some(l) = &ds.labels {
        let counts: Vec<String> = l.counts().iter().map(usize::to_string).collect();
        writeln!(out, "label counts {}", counts.join(" "))?;
    }
    if x.rows() == 0 {
        return Ok(());
    }
    writeln!(out, "{:>6}  {:>14}  {:>14}  {:>14}  {:>14}", "column", "min", "max", "mean", "std")?;
    let n = x.rows() as f64;
    for j in 0..x.cols().min(args.columns) {
        let col = x.column(j);
        let min = col.iter().copied().fold(f64::INFINITY, f64::min);
        let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        writeln!(out, "{j:>6}  {min:>14.6e}  {max:>14.6e}  {mean:>14.6e}  {:>14.6e}", var.sqrt())?;
    }
    if x.cols() > args.columns {
        writeln!(out, "({} more columns)", x.cols() - args.columns)?;
    }
    Ok(())
}
