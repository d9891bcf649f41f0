use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_echo: serde_json::Value,
    pub artifact_paths: Vec<String>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub status: String,
}

pub struct ManifestBuilder {
    command: String,
    config: serde_json::Value,
    started: DateTime<Utc>,
    artifacts: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            config,
            started: Utc::now(),
            artifacts: Vec::new(),
        }
    }

    pub fn add(&mut self, path: &Path) {
        self.artifacts.push(path.to_path_buf());
    }

    pub fn finish(self, dir: &Path, status: &str) -> pplcap::Result<PathBuf> {
        let path = dir.join(format!("{}_manifest.json", self.command));
        let m = RunManifest {
            command: self.command,
            config_echo: self.config,
            artifact_paths: self.artifacts.iter().map(|p| p.display().to_string()).collect(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started: self.started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            status: status.into(),
        };
        pplcap::export::write_json(&m, &path)?;
        Ok(path)
    }
}
