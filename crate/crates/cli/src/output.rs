//! Writing artifacts and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Resolved;
use crate::tasks::Artifact;
use crate::CliError;

#[derive(Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub version: &'static str,
    pub config: &'a Resolved,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
}

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes all artifacts into a staging directory next to `out`, then moves
/// them in. On failure nothing is left in `out`.
pub fn write(out: &Path, command: &str, config: &Resolved, artifacts: &[Artifact], wall_time_s: f64) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out).map_err(|e| io(out, e))?;
    let staging = out.join(format!(".staging-{}", std::process::id()));
    let result = stage(&staging, command, config, artifacts, wall_time_s).and_then(|names| {
        for name in &names {
            fs::rename(staging.join(name), out.join(name)).map_err(|e| io(&out.join(name), e))?;
        }
        Ok(())
    });
    let _ = fs::remove_dir_all(&staging);
    result.map(|_| out.join("manifest.json"))
}

fn stage(dir: &Path, command: &str, config: &Resolved, artifacts: &[Artifact], wall_time_s: f64) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut files = Vec::new();
    for artifact in artifacts {
        let path = dir.join(&artifact.name);
        fs::write(&path, &artifact.bytes).map_err(|e| io(&path, e))?;
        files.push(FileEntry {
            name: artifact.name.clone(),
            bytes: artifact.bytes.len(),
            sha256: format!("{:x}", Sha256::digest(&artifact.bytes)),
        });
    }
    let manifest = RunManifest { command, version: env!("CARGO_PKG_VERSION"), config, wall_time_s, files };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    let path = dir.join("manifest.json");
    fs::write(&path, text).map_err(|e| io(&path, e))?;
    let mut names: Vec<String> = artifacts.iter().map(|a| a.name.clone()).collect();
    names.push("manifest.json".into());
    Ok(names)
}
