//! End-to-end runs of the experiment drivers on small workloads.

use fpp_lab::{runner, ExperimentConfig, ExperimentKind};
use std::fs;

fn tiny(kind: ExperimentKind, out: &std::path::Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default_for(kind);
    cfg.seed = 11;
    cfg.threads = 1;
    cfg.out_dir = out.to_path_buf();
    cfg.fpp.n_list = vec![8, 16, 32];
    cfg.fpp.replicates = 4;
    cfg.oriented.levels = 150;
    cfg.oriented.replicates = 6;
    cfg.oriented.horizon = 40;
    cfg.oriented.traces = 2;
    cfg.oriented.p_list = vec![0.75, 0.85];
    cfg.shape.theta_count = 8;
    cfg
}

#[test]
fn xi_degenerate_constant_axis_reports_the_signal() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny(ExperimentKind::Xi, dir.path());
    cfg.spec = fpp_core::DistributionSpec::Constant { value: 1.0 };
    cfg.fpp.theta = 0.0;
    let manifest = runner::run(&cfg).unwrap();
    assert_eq!(manifest.outputs.len(), 2);
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("xi_fit.json")).unwrap())
            .unwrap();
    assert_eq!(fit["status"], "degenerate_all_zero");
    let samples = fs::read_to_string(dir.path().join("xi_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1 + 3 * 4, "header plus one row per (n, replicate)");
}

#[test]
fn manifest_inventories_every_artifact_with_correct_digests() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(ExperimentKind::Alpha, dir.path());
    let manifest = runner::run(&cfg).unwrap();
    assert!(!manifest.outputs.is_empty());
    for f in &manifest.outputs {
        let bytes = fs::read(dir.path().join(&f.path)).unwrap();
        assert_eq!(bytes.len() as u64, f.bytes);
        assert_eq!(fpp_lab::manifest::sha256_hex(&bytes), f.sha256, "digest of {}", f.path);
    }
    // every file in the directory except the manifest itself is inventoried
    let mut on_disk: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "run_manifest.json")
        .collect();
    on_disk.sort();
    let mut listed: Vec<String> = manifest.outputs.iter().map(|f| f.path.clone()).collect();
    listed.sort();
    assert_eq!(on_disk, listed);
}

#[test]
fn identical_config_and_seed_are_byte_identical_across_thread_counts() {
    let collect = |threads: usize| -> Vec<(String, String)> {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(ExperimentKind::Chi, dir.path());
        cfg.spec = fpp_core::DistributionSpec::DurrettLiggett { p: 0.8, high: 5.0 };
        cfg.fpp.replicates = 30;
        cfg.threads = threads;
        let manifest = runner::run(&cfg).unwrap();
        manifest.outputs.into_iter().map(|f| (f.path, f.sha256)).collect()
    };
    let one = collect(1);
    let four = collect(4);
    let again = collect(4);
    assert_eq!(one, four, "thread count changed artifact bytes");
    assert_eq!(four, again, "rerun changed artifact bytes");
}

#[test]
fn breakpoints_artifacts_have_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(ExperimentKind::Breakpoints, dir.path());
    runner::run(&cfg).unwrap();
    let trace = fs::read_to_string(dir.path().join("trace_000.csv")).unwrap();
    assert!(trace.starts_with("n,rPrime\n"));
    assert_eq!(trace.lines().count(), 1 + 151);
    let bp = fs::read_to_string(dir.path().join("breakpoints_000.csv")).unwrap();
    assert!(bp.starts_with("i,T_i,tau_i,X_i\n"));
    assert!(bp.lines().count() > 1);
    assert!(dir.path().join("breakpoints_summary.json").exists());
}

#[test]
fn alpha_curve_is_monotone_on_its_grid() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny(ExperimentKind::Alpha, dir.path());
    cfg.oriented.levels = 400;
    cfg.oriented.replicates = 10;
    runner::run(&cfg).unwrap();
    let table = fpp_lab::csvio::read_csv(&dir.path().join("alpha.csv")).unwrap();
    assert_eq!(table.header, vec!["p", "alphaHat", "stderr"]);
    let speeds: Vec<f64> = table.rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(speeds.len(), 2);
    assert!(speeds[1] > speeds[0], "alpha(0.85) should exceed alpha(0.75): {speeds:?}");
}

#[test]
fn subcritical_alpha_refuses_cone_analyses() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny(ExperimentKind::Flatseg, dir.path());
    // deep subcritical: the right edge drifts hard left
    cfg.oriented.p = 0.2;
    cfg.oriented.levels = 200;
    cfg.oriented.replicates = 8;
    match runner::run(&cfg) {
        Err(fpp_lab::RunError::Compute { stage, .. }) => assert_eq!(stage, "alpha"),
        other => panic!("expected the alpha gate to refuse, got {other:?}"),
    }
}

#[test]
fn shape_grid_floor_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny(ExperimentKind::Shape, dir.path());
    cfg.shape.theta_count = 5;
    assert!(matches!(runner::run(&cfg), Err(fpp_lab::RunError::Config(_))));
}
