use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// Record of one invocation, written next to the files it produced.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub artifacts: Vec<String>,
    pub version: String,
    pub wall_clock_seconds: f64,
}

pub struct Run {
    command: String,
    parameters: Value,
    seed: Option<u64>,
    artifacts: Vec<PathBuf>,
    started: Instant,
}

impl Run {
    pub fn new(command: &str, parameters: Value, seed: Option<u64>) -> Self {
        Run { command: command.to_string(), parameters, seed, artifacts: Vec::new(), started: Instant::now() }
    }

    pub fn write(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, contents)?;
        self.artifacts.push(path.to_path_buf());
        Ok(())
    }

    /// Writes the manifest to `path`; it lists itself last.
    pub fn finish(mut self, path: &Path) -> std::io::Result<()> {
        self.artifacts.push(path.to_path_buf());
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            seed: self.seed,
            artifacts: self.artifacts.iter().map(|p| p.display().to_string()).collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        fs::write(path, json + "\n")
    }
}

/// `dir/stem.suffix` for a sidecar of `out`.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}.{suffix}"))
}
