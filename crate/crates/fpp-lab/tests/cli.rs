//! Exercises the installed binary: flags, config files, exit codes.

use std::fs;
use std::path::Path;
use std::process::Command;

fn fpp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fpp"))
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

#[test]
fn happy_path_xi_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("xi.cfg");
    write(
        &cfg,
        "[experiment]\nkind = xi\nseed = 5\n[distribution]\nkind = constant\nvalue = 1\n\
         [fpp]\ntheta = 0\nn_list = 8,16,32\nreplicates = 3\n",
    );
    let out = dir.path().join("run");
    let status = fpp()
        .args(["xi", "--config"])
        .arg(&cfg)
        .args(["--threads", "1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("xi_samples.csv").exists());
    assert!(out.join("xi_fit.json").exists());
    assert!(out.join("run_manifest.json").exists());
}

#[test]
fn missing_config_file_exits_2() {
    let status = fpp().args(["xi", "--config", "/nonexistent/xi.cfg"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn mismatched_kind_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    write(&cfg, "[experiment]\nkind = chi\n");
    let status = fpp().args(["xi", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn invalid_distribution_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    write(&cfg, "[distribution]\nkind = durrett_liggett\np = 1.4\nhigh = 5\n");
    let status = fpp().args(["xi", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn bogus_threads_env_exits_2() {
    let status = fpp().args(["alpha"]).env("FPP_THREADS", "lots").status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn plotdata_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let artifact = dir.path().join("boundary.csv");
    write(&artifact, "theta,rB,stderr\n1.0e0,7.0e-1,1.0e-3\n");
    let status = fpp()
        .arg("plotdata")
        .arg(&artifact)
        .args(["--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let plot = fs::read_to_string(dir.path().join("plot.csv")).unwrap();
    assert!(plot.starts_with("series,x,y,yerr\nrB,"));

    let status = fpp().arg("plotdata").status().unwrap();
    assert_eq!(status.code(), Some(2), "no inputs is a usage error");
    let status =
        fpp().arg("plotdata").arg(dir.path().join("missing.csv")).status().unwrap();
    assert_eq!(status.code(), Some(1), "unreadable input is a compute error");
}

#[test]
fn env_threads_override_keeps_artifacts_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("xi.cfg");
    write(
        &cfg,
        "[experiment]\nkind = xi\nseed = 9\n[distribution]\nkind = durrett_liggett\np = 0.8\nhigh = 5\n\
         [fpp]\nn_list = 8,16,32\nreplicates = 4\n",
    );
    let mut digests = Vec::new();
    for threads in ["1", "2"] {
        let out = dir.path().join(format!("run{threads}"));
        let status = fpp()
            .args(["xi", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("FPP_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("run_manifest.json")).unwrap())
                .unwrap();
        digests.push(manifest["outputs"].to_string());
    }
    assert_eq!(digests[0], digests[1]);
}
