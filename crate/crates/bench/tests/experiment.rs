use std::collections::BTreeSet;

use lakm_bench::emit::{emit_results, from_json, to_json, write_csv, CSV_COLUMNS};
use lakm_bench::experiment::cell_seed;
use lakm_bench::{run_experiment, BenchError, DatasetSource, ExperimentConfig, Format, Variant};
use lakm_core::PcaPolicy;

fn small(rates: &[f64], trials: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("synth:k=4,n=40,dim=6,sep=15,sigma=1,seed=3".parse().unwrap(), 4);
    cfg.error_rates = rates.to_vec();
    cfg.trials = trials;
    cfg.master_seed = 17;
    cfg.pca = None;
    cfg
}

fn csv_string(cfg: &ExperimentConfig) -> String {
    let mut buf = Vec::new();
    write_csv(&run_experiment(cfg).unwrap(), &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn grid_is_complete_and_sorted() {
    let res = run_experiment(&small(&[0.0, 0.3, 0.7], 3)).unwrap();
    assert_eq!(res.cells.len(), 3 * 3 * 2);
    let keys: BTreeSet<_> = res.cells.iter().map(|c| (c.rate_index, c.trial, c.variant)).collect();
    assert_eq!(keys.len(), res.cells.len());
    let order: Vec<_> = res.cells.iter().map(|c| (c.rate_index, c.trial, c.variant)).collect();
    assert_eq!(order, keys.into_iter().collect::<Vec<_>>());
}

#[test]
fn ratios_recompute_from_costs() {
    let res = run_experiment(&small(&[0.0, 0.5, 1.0], 2)).unwrap();
    for c in &res.cells {
        assert_eq!(c.baseline_cost, res.baseline_cost);
        assert!((c.cost_ratio - c.method_cost / c.baseline_cost).abs() <= 1e-12 * c.cost_ratio.max(1.0));
        assert_eq!(c.seed, cell_seed(17, c.rate_index, c.trial));
        assert_eq!(c.reduced_dim, 6);
        if c.variant == Variant::SeedOnly {
            assert_eq!(c.iterations, 0);
        }
    }
}

#[test]
fn clean_labels_reproduce_the_baseline() {
    let res = run_experiment(&small(&[0.0], 4)).unwrap();
    for c in res.cells.iter().filter(|c| c.variant == Variant::Refined) {
        assert!(c.cost_ratio <= 1.0 + 1e-9, "trial {}: {}", c.trial, c.cost_ratio);
    }
}

#[test]
fn refined_trend_rises_with_corruption() {
    let mut cfg = ExperimentConfig::new("synth:k=10,n=200,dim=50,sep=30,sigma=1,seed=12".parse().unwrap(), 10);
    cfg.error_rates = vec![0.0, 0.5, 1.0];
    cfg.trials = 5;
    cfg.master_seed = 12;
    let res = run_experiment(&cfg).unwrap();
    let means = res.mean_ratios(Variant::Refined);
    assert!(means.windows(2).all(|w| w[1] >= w[0]), "{means:?}");
    for (s, r) in res.mean_ratios(Variant::SeedOnly).iter().zip(&means) {
        assert!(r <= s);
    }
}

#[test]
fn cells_do_not_depend_on_other_rates_or_trial_counts() {
    let a = run_experiment(&small(&[0.2, 0.6], 2)).unwrap();
    let b = run_experiment(&small(&[0.2, 0.6], 4)).unwrap();
    for c in &a.cells {
        let twin = b
            .cells
            .iter()
            .find(|d| (d.rate_index, d.trial, d.variant) == (c.rate_index, c.trial, c.variant))
            .unwrap();
        assert_eq!(c.method_cost, twin.method_cost);
        assert_eq!(c.seed, twin.seed);
    }
}

#[test]
fn no_refine_emits_seed_only_rows() {
    let mut cfg = small(&[0.1, 0.2], 1);
    cfg.refine = false;
    let res = run_experiment(&cfg).unwrap();
    assert!(res.cells.iter().all(|c| c.variant == Variant::SeedOnly));
    assert_eq!(res.cells.len(), 2);
}

#[test]
fn default_pca_keeps_most_variance() {
    let cfg = ExperimentConfig::new("synth:k=4,n=40,dim=6,sep=15,sigma=1,seed=3".parse().unwrap(), 4);
    assert_eq!(cfg.pca, Some(PcaPolicy::EvrThreshold(0.95)));
    let mut cfg = cfg;
    cfg.error_rates = vec![0.0];
    cfg.trials = 1;
    let res = run_experiment(&cfg).unwrap();
    assert!(res.cells.iter().all(|c| c.reduced_dim < 6));
}

#[test]
fn pca_reports_reduced_dimension() {
    let mut cfg = small(&[0.0, 0.4], 2);
    cfg.pca = Some(PcaPolicy::FixedDim(2));
    let res = run_experiment(&cfg).unwrap();
    assert!(res.cells.iter().all(|c| c.reduced_dim == 2));
}

#[test]
fn csv_row_counts() {
    let empty = csv_string(&small(&[], 3));
    assert_eq!(empty, format!("{}\n", CSV_COLUMNS.join(",")));

    let csv = csv_string(&small(&[0.0, 0.5], 1));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 4);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), CSV_COLUMNS.len());
        assert!(line.starts_with("1,"));
    }
}

#[test]
fn csv_floats_parse_back_exactly() {
    let res = run_experiment(&small(&[0.3], 2)).unwrap();
    let mut buf = Vec::new();
    write_csv(&res, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let col = CSV_COLUMNS.iter().position(|c| *c == "method_cost").unwrap();
    for (line, cell) in text.lines().skip(1).zip(&res.cells) {
        let v: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
        assert_eq!(v.to_bits(), cell.method_cost.to_bits());
    }
}

#[test]
fn json_round_trips_to_an_identical_document() {
    let mut cfg = small(&[0.0, 0.25], 2);
    cfg.pca = Some(PcaPolicy::EvrThreshold(0.9));
    cfg.seeding = lakm_core::SeedingMode::trimmed();
    cfg.subsample = Some(lakm_bench::Subsample { count: 100, seed: 4 });
    let res = run_experiment(&cfg).unwrap();
    let json = to_json(&res).unwrap();
    let parsed = from_json(&json).unwrap();
    assert_eq!(parsed, res);
    assert_eq!(to_json(&parsed).unwrap(), json);

    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["library_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["dataset"], "synth:k=4,n=40,dim=6,sep=15,sigma=1,seed=3");
}

#[test]
fn emit_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let res = run_experiment(&small(&[0.5], 1)).unwrap();
    emit_results(&res, Format::Csv, dir.path().join("r.csv")).unwrap();
    emit_results(&res, Format::Json, dir.path().join("r.json")).unwrap();
    let json = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert_eq!(from_json(&json).unwrap(), res);
    let err = emit_results(&res, Format::Csv, dir.path().join("missing/r.csv")).unwrap_err();
    assert!(matches!(err, BenchError::Io(_)));
}

#[test]
fn configuration_errors_come_before_compute() {
    let mut cfg = small(&[0.0], 1);
    cfg.k = 0;
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains('k'));

    let mut cfg = small(&[0.0], 1);
    cfg.dataset = DatasetSource::Csv { path: "/definitely/not/here.csv".into(), has_header: false };
    cfg.trials = 0;
    assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 1);

    let mut cfg = small(&[0.0], 1);
    cfg.k = 500;
    assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 1);

    let mut cfg = small(&[0.0], 1);
    cfg.dataset = DatasetSource::Csv { path: "/definitely/not/here.csv".into(), has_header: false };
    assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 2);
}

#[test]
fn edge_list_sources_are_embedded() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let mut cfg = ExperimentConfig::new(format!("edges:{dir}/tests/fixtures/two_triangles.txt").parse().unwrap(), 2);
    cfg.error_rates = vec![0.0];
    cfg.trials = 1;
    let res = run_experiment(&cfg).unwrap();
    assert_eq!(res.dataset.points, 6);
    assert_eq!(res.dataset.dim, 2);
}
