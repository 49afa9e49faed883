//! Conversion of run artifacts into one tidy long-format CSV
//! `(series, x, y, yerr)` that any plotting tool can consume. Artifact types
//! are recognized by their header row; fitted curves are recomputed from the
//! samples so the exported overlay always matches the fit files.

use crate::csvio::{fmt_f64, read_csv, CsvTable, CsvWriter};
use crate::runner::RunError;
use fpp_core::{estimate_chi, estimate_xi, FluctuationSample, VariancePoint};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

fn compute_err<E: std::fmt::Display>(stage: &str) -> impl Fn(E) -> RunError + '_ {
    move |e| RunError::Compute { stage: stage.to_string(), message: e.to_string() }
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, RunError> {
    s.parse().map_err(|_| RunError::Compute {
        stage: "plotdata".into(),
        message: format!("cannot parse '{s}' as {what}"),
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_unstable_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn emit(out: &mut CsvWriter, series: &str, x: f64, y: f64, yerr: Option<f64>) {
    out.row(&[
        series.to_string(),
        fmt_f64(x),
        fmt_f64(y),
        yerr.map(fmt_f64).unwrap_or_default(),
    ]);
}

fn grouped_by_n(table: &CsvTable) -> Result<BTreeMap<u64, Vec<f64>>, RunError> {
    let mut by_n: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for row in &table.rows {
        by_n.entry(parse(&row[0], "n")?).or_default().push(parse(&row[2], "value")?);
    }
    Ok(by_n)
}

fn convert(table: &CsvTable, out: &mut CsvWriter) -> Result<(), RunError> {
    let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
    match header.as_slice() {
        ["theta", "rB", "stderr"] => {
            for row in &table.rows {
                emit(
                    out,
                    "rB",
                    parse(&row[0], "theta")?,
                    parse(&row[1], "rB")?,
                    Some(parse(&row[2], "stderr")?),
                );
            }
        }
        ["n", "replicateId", "hn"] => {
            let by_n = grouped_by_n(table)?;
            let samples: Vec<FluctuationSample> = table
                .rows
                .iter()
                .map(|row| {
                    Ok(FluctuationSample {
                        n: parse(&row[0], "n")?,
                        replicate_id: parse(&row[1], "replicateId")?,
                        hn: parse(&row[2], "hn")?,
                        seed: 0,
                    })
                })
                .collect::<Result<_, RunError>>()?;
            for (&n, values) in &by_n {
                emit(out, "hn_median", n as f64, median(values.clone()), None);
            }
            if let Ok(fit) = estimate_xi(&samples) {
                for &n in by_n.keys() {
                    let y = (fit.intercept + fit.exponent * (n as f64).ln()).exp();
                    emit(out, "hn_fit", n as f64, y, None);
                }
            }
        }
        ["n", "replicateId", "T"] => {
            for (&n, values) in &grouped_by_n(table)? {
                let k = values.len() as f64;
                let mean = values.iter().sum::<f64>() / k;
                let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (k - 1.0).max(1.0))
                .sqrt();
                emit(out, "T_mean", n as f64, mean, Some(sd / k.sqrt()));
            }
        }
        ["n", "varT"] => {
            let mut scan = Vec::new();
            for row in &table.rows {
                let n: u64 = parse(&row[0], "n")?;
                let var: f64 = parse(&row[1], "varT")?;
                emit(out, "varT", n as f64, var, None);
                scan.push(VariancePoint { n, var, replicates: 0 });
            }
            if let Ok(fit) = estimate_chi(&scan) {
                for p in &scan {
                    let y = (fit.intercept + 2.0 * fit.exponent * (p.n as f64).ln()).exp();
                    emit(out, "varT_fit", p.n as f64, y, None);
                }
            }
        }
        ["p", "alphaHat", "stderr"] => {
            for row in &table.rows {
                emit(
                    out,
                    "alpha",
                    parse(&row[0], "p")?,
                    parse(&row[1], "alphaHat")?,
                    Some(parse(&row[2], "stderr")?),
                );
            }
        }
        ["n", "rPrime"] => {
            for row in &table.rows {
                emit(out, "rPrime", parse(&row[0], "n")?, parse(&row[1], "rPrime")?, None);
            }
        }
        other => {
            return Err(RunError::Compute {
                stage: "plotdata".into(),
                message: format!("unrecognized artifact header {other:?}"),
            })
        }
    }
    Ok(())
}

/// Convert artifact files into `<out>/plot.csv`.
pub fn emit_plot_data(inputs: &[PathBuf], out_dir: &Path) -> Result<PathBuf, RunError> {
    let mut out = CsvWriter::new(&["series", "x", "y", "yerr"]);
    for path in inputs {
        let table = read_csv(path).map_err(compute_err("read-artifact"))?;
        convert(&table, &mut out)?;
    }
    std::fs::create_dir_all(out_dir).map_err(compute_err("create-out-dir"))?;
    let path = out_dir.join("plot.csv");
    out.write_to(&path).map_err(compute_err("write-plot"))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn boundary_rows_become_series_rows() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("boundary.csv");
        fs::write(&input, "theta,rB,stderr\n0.5,7.0e-1,1.0e-3\n").unwrap();
        let out = emit_plot_data(&[input], dir.path()).unwrap();
        let text = fs::read_to_string(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "series,x,y,yerr");
        let row = lines.next().unwrap();
        assert!(row.starts_with("rB,"));
        assert_eq!(row.split(',').count(), 4);
    }

    #[test]
    fn empty_artifact_produces_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("boundary.csv");
        fs::write(&input, "theta,rB,stderr\n").unwrap();
        let out = emit_plot_data(&[input], dir.path()).unwrap();
        assert_eq!(fs::read_to_string(out).unwrap(), "series,x,y,yerr\n");
    }

    #[test]
    fn xi_samples_gain_median_and_recomputed_fit_series() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("xi_samples.csv");
        let mut text = String::from("n,replicateId,hn\n");
        for (n, h) in [(16u64, 4.0f64), (64, 8.0), (256, 16.0)] {
            for rep in 0..3 {
                text.push_str(&format!("{n},{rep},{h}\n"));
            }
        }
        fs::write(&input, text).unwrap();
        let out = emit_plot_data(&[input], dir.path()).unwrap();
        let plot = fs::read_to_string(out).unwrap();
        let medians: Vec<&str> = plot.lines().filter(|l| l.starts_with("hn_median,")).collect();
        let fit: Vec<&str> = plot.lines().filter(|l| l.starts_with("hn_fit,")).collect();
        assert_eq!(medians.len(), 3);
        assert_eq!(fit.len(), 3);
        // the data is an exact half-power law: the exported curve must match it
        for line in fit {
            let cols: Vec<&str> = line.split(',').collect();
            let x: f64 = cols[1].parse().unwrap();
            let y: f64 = cols[2].parse().unwrap();
            assert!((y - x.sqrt()).abs() < 1e-9, "{line}");
        }
    }

    #[test]
    fn unknown_header_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("odd.csv");
        fs::write(&input, "a,b\n1,2\n").unwrap();
        assert!(emit_plot_data(&[input], dir.path()).is_err());
        assert!(emit_plot_data(&[dir.path().join("missing.csv")], dir.path()).is_err());
    }
}
