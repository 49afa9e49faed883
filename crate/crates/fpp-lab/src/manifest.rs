//! Run manifests: every artifact a run writes is inventoried with a content
//! digest, so a rerun is verifiable by comparing digests alone.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub kind: String,
    /// Full resolved configuration, in the config file format.
    pub config: String,
    pub wall_seconds: f64,
    pub stages: Vec<StageTiming>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(dir: &Path, rel: &str) -> std::io::Result<FileDigest> {
    let bytes = fs::read(dir.join(rel))?;
    Ok(FileDigest { path: rel.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) })
}

/// Wall-clock bookkeeping for the manifest's per-stage timings.
pub struct StageClock {
    start: Instant,
    last: Instant,
    stages: Vec<StageTiming>,
}

impl StageClock {
    pub fn start() -> StageClock {
        let now = Instant::now();
        StageClock { start: now, last: now, stages: Vec::new() }
    }

    pub fn mark(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages
            .push(StageTiming { stage: stage.to_string(), seconds: (now - self.last).as_secs_f64() });
        self.last = now;
    }

    pub fn finish(self) -> (Vec<StageTiming>, f64) {
        (self.stages, self.start.elapsed().as_secs_f64())
    }
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> std::io::Result<PathBuf> {
    let path = dir.join("run_manifest.json");
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(&path, json.as_bytes())?;
    Ok(path)
}
