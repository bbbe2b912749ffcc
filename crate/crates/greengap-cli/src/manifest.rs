use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::{Deserialize, Serialize};

/// Record of a completed run. Written after every other output, so its
/// presence marks completion; it is the only file carrying a timestamp.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub output_paths: Vec<PathBuf>,
    pub tool_version: String,
    /// UTC, ISO-8601.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_path: Option<PathBuf>,
        seed: u64,
        output_paths: Vec<PathBuf>,
    ) -> Self {
        Self {
            command: command.to_string(),
            config_path,
            seed,
            output_paths,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        std::fs::write(path, bytes)?;
        Ok(())
    }
}
