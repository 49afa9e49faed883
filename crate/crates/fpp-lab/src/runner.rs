//! Experiment execution: replicate scheduling over a work-stealing pool,
//! deterministic reduction, artifact emission and the run manifest.
//!
//! Tasks are pure functions of `(config, seed, task key)`, results are
//! reduced in canonical task order and written by one thread, so artifacts
//! are byte-identical for any worker count.

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::csvio::{fmt_f64, CsvWriter};
use crate::manifest::{digest_file, write_manifest, RunManifest, StageClock};
use fpp_core::rng::derive_seed;
use fpp_core::{
    estimate_chi, estimate_xi, fluct, fluctuation_tasks, reduce_variances, theta_endpoints,
    variance_tasks, AlphaEstimate, BoundarySample, CurvatureEstimate, Direction, Error,
    OrientedField, ShapeBoundary, Side,
};
use rayon::prelude::*;
use serde_json::json;
use std::fs;
use std::path::Path;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum RunError {
    /// Invalid configuration; CLI exit code 2.
    #[error("config: {0}")]
    Config(String),
    /// Failure while computing or writing; CLI exit code 1.
    #[error("stage '{stage}': {message}")]
    Compute { stage: String, message: String },
}

fn compute_err<E: std::fmt::Display>(stage: &str) -> impl Fn(E) -> RunError + '_ {
    move |e| RunError::Compute { stage: stage.to_string(), message: e.to_string() }
}

/// Run one experiment to completion and return its manifest.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, RunError> {
    config.spec.validate().map_err(|e| RunError::Config(e.to_string()))?;
    fs::create_dir_all(&config.out_dir).map_err(compute_err("create-out-dir"))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(compute_err("thread-pool"))?;
    let mut clock = StageClock::start();
    let outputs = pool.install(|| dispatch(config, &mut clock))?;
    let mut digests = Vec::new();
    for rel in &outputs {
        digests.push(digest_file(&config.out_dir, rel).map_err(compute_err("digest"))?);
    }
    let (stages, wall) = clock.finish();
    let manifest = RunManifest {
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        kind: config.kind.as_str().to_string(),
        config: config.serialize(),
        wall_seconds: wall,
        stages,
        outputs: digests,
    };
    write_manifest(&config.out_dir, &manifest).map_err(compute_err("write-manifest"))?;
    Ok(manifest)
}

fn dispatch(config: &ExperimentConfig, clock: &mut StageClock) -> Result<Vec<String>, RunError> {
    match config.kind {
        ExperimentKind::Xi => run_xi(config, clock),
        ExperimentKind::Chi => run_chi(config, clock),
        ExperimentKind::Shape => run_shape(config, clock),
        ExperimentKind::Curvature => run_curvature(config, clock),
        ExperimentKind::Alpha => run_alpha(config, clock),
        ExperimentKind::Breakpoints => run_breakpoints(config, clock),
        ExperimentKind::Flatseg => run_flatseg(config, clock),
    }
}

fn write_json(dir: &Path, rel: &str, value: &serde_json::Value) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    fs::write(dir.join(rel), text.as_bytes()).map_err(compute_err("write-json"))
}

fn fit_json(fit: Result<fpp_core::ExponentFit, Error>) -> Result<serde_json::Value, RunError> {
    match fit {
        Ok(f) => Ok(json!({
            "status": "ok",
            "exponent": f.exponent,
            "intercept": f.intercept,
            "stderr": f.stderr,
            "nMin": f.n_range.0,
            "nMax": f.n_range.1,
            "pointsUsed": f.points_used,
        })),
        Err(Error::DegenerateAllZero) => Ok(json!({ "status": "degenerate_all_zero" })),
        Err(e) => Err(RunError::Compute { stage: "fit".into(), message: e.to_string() }),
    }
}

fn run_xi(config: &ExperimentConfig, clock: &mut StageClock) -> Result<Vec<String>, RunError> {
    let dir = Direction::new(config.fpp.r, config.fpp.theta)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let tasks = fluctuation_tasks(
        config.spec,
        dir,
        &config.fpp.n_list,
        config.fpp.replicates,
        config.seed,
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let samples: Vec<fpp_core::FluctuationSample> = tasks
        .par_iter()
        .map(|t| t.run())
        .collect::<Result<_, _>>()
        .map_err(compute_err("xi-samples"))?;
    clock.mark("samples");

    let mut csv = CsvWriter::new(&["n", "replicateId", "hn"]);
    for s in &samples {
        csv.row(&[s.n.to_string(), s.replicate_id.to_string(), fmt_f64(s.hn)]);
    }
    csv.write_to(&config.out_dir.join("xi_samples.csv")).map_err(compute_err("write-samples"))?;
    write_json(&config.out_dir, "xi_fit.json", &fit_json(estimate_xi(&samples))?)?;
    clock.mark("fit-and-write");
    Ok(vec!["xi_samples.csv".into(), "xi_fit.json".into()])
}

fn run_chi(config: &ExperimentConfig, clock: &mut StageClock) -> Result<Vec<String>, RunError> {
    let dir = Direction::new(config.fpp.r, config.fpp.theta)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let tasks = variance_tasks(
        config.spec,
        dir,
        &config.fpp.n_list,
        config.fpp.replicates,
        config.seed,
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let rows: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|t| t.run())
        .collect::<Result<_, _>>()
        .map_err(compute_err("chi-samples"))?;
    clock.mark("samples");

    let mut csv = CsvWriter::new(&["n", "replicateId", "T"]);
    for (rep, row) in rows.iter().enumerate() {
        for (j, t) in row.iter().enumerate() {
            csv.row(&[config.fpp.n_list[j].to_string(), rep.to_string(), fmt_f64(*t)]);
        }
    }
    csv.write_to(&config.out_dir.join("chi_samples.csv")).map_err(compute_err("write-samples"))?;

    let scan = reduce_variances(&config.fpp.n_list, &rows);
    let mut vcsv = CsvWriter::new(&["n", "varT"]);
    for p in &scan {
        vcsv.row(&[p.n.to_string(), fmt_f64(p.var)]);
    }
    vcsv.write_to(&config.out_dir.join("chi_variance.csv"))
        .map_err(compute_err("write-variance"))?;
    write_json(&config.out_dir, "chi_fit.json", &fit_json(estimate_chi(&scan))?)?;
    clock.mark("fit-and-write");
    Ok(vec!["chi_samples.csv".into(), "chi_variance.csv".into(), "chi_fit.json".into()])
}

/// Boundary over a signed-angle grid: negative angles are measured at the
/// reflected direction, which is legitimate by the lattice's axis symmetry.
pub fn parallel_boundary(
    config: &ExperimentConfig,
    thetas: &[f64],
) -> Result<ShapeBoundary, RunError> {
    let samples: Vec<BoundarySample> = thetas
        .par_iter()
        .map(|&theta| -> Result<BoundarySample, Error> {
            let dir = Direction::new(1.0, theta.abs())?;
            let mu = fpp_core::estimate_mu(
                config.spec,
                dir,
                &config.fpp.n_list,
                config.fpp.replicates,
                config.seed,
            )?;
            if !(mu.mu > 0.0) {
                return Err(Error::Estimator(format!("nonpositive mu at theta {theta}")));
            }
            Ok(BoundarySample { theta, r_b: 1.0 / mu.mu, stderr: mu.stderr / (mu.mu * mu.mu) })
        })
        .collect::<Result<_, _>>()
        .map_err(compute_err("boundary"))?;
    ShapeBoundary::new(samples, match config.spec {
        fpp_core::DistributionSpec::DurrettLiggett { p, .. } => Some(p),
        _ => None,
    })
    .map_err(compute_err("boundary"))
}

fn write_boundary(config: &ExperimentConfig, b: &ShapeBoundary) -> Result<(), RunError> {
    let mut csv = CsvWriter::new(&["theta", "rB", "stderr"]);
    for s in &b.samples {
        csv.row(&[fmt_f64(s.theta), fmt_f64(s.r_b), fmt_f64(s.stderr)]);
    }
    csv.write_to(&config.out_dir.join("boundary.csv")).map_err(compute_err("write-boundary"))
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

fn run_shape(config: &ExperimentConfig, clock: &mut StageClock) -> Result<Vec<String>, RunError> {
    if config.shape.theta_count < 8 {
        return Err(RunError::Config("shape grid needs >= 8 angles".into()));
    }
    let thetas = linspace(config.shape.theta_min, config.shape.theta_max, config.shape.theta_count);
    let boundary = parallel_boundary(config, &thetas)?;
    clock.mark("boundary");
    write_boundary(config, &boundary)?;
    clock.mark("write");
    Ok(vec!["boundary.csv".into()])
}

fn estimate_alpha_parallel(config: &ExperimentConfig, p: f64) -> Result<AlphaEstimate, RunError> {
    let tasks = fpp_core::oriented::alpha_tasks(
        p,
        config.oriented.levels,
        config.oriented.replicates,
        config.seed,
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let speeds: Vec<f64> = tasks
        .par_iter()
        .map(|t| t.run())
        .collect::<Result<_, _>>()
        .map_err(compute_err("alpha"))?;
    Ok(fpp_core::oriented::reduce_alpha(p, config.oriented.levels, &speeds))
}

fn alpha_json(a: &AlphaEstimate) -> serde_json::Value {
    json!({
        "p": a.p,
        "N": a.n_levels,
        "replicates": a.replicates,
        "alphaHat": a.alpha_hat,
        "stderr": a.stderr,
    })
}

/// Supercriticality gate for analyses that consume the estimated speed.
fn require_supercritical(a: &AlphaEstimate) -> Result<(), RunError> {
    if a.alpha_hat <= 2.0 * a.stderr {
        return Err(RunError::Compute {
            stage: "alpha".into(),
            message: format!(
                "alphaHat = {} +- {} is not resolvably positive; no percolation cone at p = {}",
                a.alpha_hat, a.stderr, a.p
            ),
        });
    }
    Ok(())
}

fn curvature_json(c: &CurvatureEstimate) -> serde_json::Value {
    json!({
        "theta0": c.theta0,
        "side": match c.side { Side::Plus => "plus", Side::Minus => "minus" },
        "kappa": c.kappa,
        "fitStderr": c.fit_stderr,
        "flat": c.flat,
        "windowUsed": { "points": c.points_used, "maxD": c.max_d },
    })
}

/// Curvature grid at the lower cone endpoint: `below` angles probing the
/// curved side, the anchor itself, and near-side in-cone angles within the
/// fit's distance cap.
pub fn curvature_grid(theta0: f64, theta_plus: f64, total: usize, below_window: f64) -> Vec<f64> {
    let below = total.saturating_sub(1) / 2 + 1;
    let above = total - below - 1;
    let mut grid = Vec::with_capacity(total);
    for i in 0..below {
        grid.push(theta0 - below_window + below_window * i as f64 / below as f64);
    }
    grid.push(theta0);
    let above_span = (theta_plus - 0.05 - theta0).min(0.14);
    for i in 1..=above {
        grid.push(theta0 + above_span * i as f64 / above as f64);
    }
    grid
}

fn run_curvature(
    config: &ExperimentConfig,
    clock: &mut StageClock,
) -> Result<Vec<String>, RunError> {
    let alpha = estimate_alpha_parallel(config, config.oriented.p)?;
    clock.mark("alpha");
    require_supercritical(&alpha)?;
    let ends = theta_endpoints(alpha.alpha_hat).map_err(compute_err("theta-endpoints"))?;
    let grid = curvature_grid(
        ends.theta_minus,
        ends.theta_plus,
        config.shape.grid_points,
        config.shape.below_window,
    );
    let boundary = parallel_boundary(config, &grid)?;
    clock.mark("boundary");
    let plus = fpp_core::curvature_exponent(&boundary, ends.theta_minus, Side::Plus)
        .map_err(compute_err("curvature-plus"))?;
    let minus = fpp_core::curvature_exponent(&boundary, ends.theta_minus, Side::Minus)
        .map_err(compute_err("curvature-minus"))?;
    clock.mark("curvature");

    write_json(&config.out_dir, "alpha.json", &alpha_json(&alpha))?;
    write_boundary(config, &boundary)?;
    write_json(
        &config.out_dir,
        "curvature.json",
        &json!([curvature_json(&plus), curvature_json(&minus)]),
    )?;
    clock.mark("write");
    Ok(vec!["alpha.json".into(), "boundary.csv".into(), "curvature.json".into()])
}

fn run_alpha(config: &ExperimentConfig, clock: &mut StageClock) -> Result<Vec<String>, RunError> {
    if config.oriented.p_list.is_empty() {
        return Err(RunError::Config("alpha experiment needs a nonempty p_list".into()));
    }
    let estimates: Vec<AlphaEstimate> = config
        .oriented
        .p_list
        .iter()
        .map(|&p| estimate_alpha_parallel(config, p))
        .collect::<Result<_, _>>()?;
    clock.mark("alpha-curve");

    let mut csv = CsvWriter::new(&["p", "alphaHat", "stderr"]);
    for a in &estimates {
        csv.row(&[fmt_f64(a.p), fmt_f64(a.alpha_hat), fmt_f64(a.stderr)]);
    }
    csv.write_to(&config.out_dir.join("alpha.csv")).map_err(compute_err("write-alpha"))?;
    let arr: Vec<serde_json::Value> = estimates.iter().map(alpha_json).collect();
    write_json(&config.out_dir, "alpha.json", &serde_json::Value::Array(arr))?;
    clock.mark("write");
    Ok(vec!["alpha.csv".into(), "alpha.json".into()])
}

fn run_breakpoints(
    config: &ExperimentConfig,
    clock: &mut StageClock,
) -> Result<Vec<String>, RunError> {
    let traces = config.oriented.traces;
    if traces == 0 {
        return Err(RunError::Config("breakpoints experiment needs traces >= 1".into()));
    }
    let sequences: Vec<fpp_core::BreakPointSequence> = (0..traces)
        .into_par_iter()
        .map(|k| {
            let field = OrientedField::new(
                config.oriented.p,
                derive_seed(config.seed, fluct::domain::BREAKPOINTS, k),
                0,
            )?;
            fpp_core::break_points(&field, config.oriented.levels, config.oriented.horizon)
        })
        .collect::<Result<_, _>>()
        .map_err(compute_err("breakpoints"))?;
    clock.mark("traces");

    let mut outputs = Vec::new();
    let mut total_entries = 0usize;
    for (k, seq) in sequences.iter().enumerate() {
        let trace_name = format!("trace_{k:03}.csv");
        let mut tcsv = CsvWriter::new(&["n", "rPrime"]);
        for (n, r) in seq.trace.values.iter().enumerate() {
            tcsv.row(&[n.to_string(), r.to_string()]);
        }
        tcsv.write_to(&config.out_dir.join(&trace_name)).map_err(compute_err("write-trace"))?;
        outputs.push(trace_name);

        let bp_name = format!("breakpoints_{k:03}.csv");
        let mut bcsv = CsvWriter::new(&["i", "T_i", "tau_i", "X_i"]);
        for (i, e) in seq.entries.iter().enumerate() {
            bcsv.row(&[
                (i + 1).to_string(),
                e.level.to_string(),
                e.tau.to_string(),
                e.x.to_string(),
            ]);
        }
        bcsv.write_to(&config.out_dir.join(&bp_name)).map_err(compute_err("write-breakpoints"))?;
        outputs.push(bp_name);
        total_entries += seq.entries.len();
    }
    let summary = json!({
        "p": config.oriented.p,
        "N": config.oriented.levels,
        "horizonH": config.oriented.horizon,
        "traces": traces,
        "breakPoints": total_entries,
        "meanTau": sequences
            .iter()
            .flat_map(|s| s.entries.iter().map(|e| e.tau as f64))
            .sum::<f64>() / total_entries as f64,
        "meanX": sequences
            .iter()
            .flat_map(|s| s.entries.iter().map(|e| e.x as f64))
            .sum::<f64>() / total_entries as f64,
    });
    write_json(&config.out_dir, "breakpoints_summary.json", &summary)?;
    outputs.push("breakpoints_summary.json".into());
    clock.mark("write");
    Ok(outputs)
}

fn run_flatseg(config: &ExperimentConfig, clock: &mut StageClock) -> Result<Vec<String>, RunError> {
    let alpha = estimate_alpha_parallel(config, config.oriented.p)?;
    clock.mark("alpha");
    require_supercritical(&alpha)?;
    let ends = theta_endpoints(alpha.alpha_hat).map_err(compute_err("theta-endpoints"))?;
    let m = config.shape.cone_margin;
    let (lo, hi) = (ends.theta_minus + m, ends.theta_plus - m);
    if !(lo < hi) {
        return Err(RunError::Compute {
            stage: "flatseg".into(),
            message: format!("cone ({}, {}) too narrow for margin {m}", ends.theta_minus, ends.theta_plus),
        });
    }
    let thetas = linspace(lo, hi, config.shape.theta_count.max(2));
    let boundary = parallel_boundary(config, &thetas)?;
    clock.mark("boundary");
    let seg = fpp_core::flat_segment_detect(&boundary, alpha.alpha_hat)
        .map_err(compute_err("flat-segment"))?;

    write_json(&config.out_dir, "alpha.json", &alpha_json(&alpha))?;
    write_boundary(config, &boundary)?;
    write_json(
        &config.out_dir,
        "endpoints.json",
        &json!({
            "thetaMinus": seg.theta_minus,
            "thetaPlus": seg.theta_plus,
            "segmentRadius": seg.segment_radius,
            "maxDeviation": seg.max_deviation,
            "samplesInside": seg.samples_inside,
            "alphaHat": alpha.alpha_hat,
            "alphaStderr": alpha.stderr,
        }),
    )?;
    clock.mark("write");
    Ok(vec!["alpha.json".into(), "boundary.csv".into(), "endpoints.json".into()])
}
