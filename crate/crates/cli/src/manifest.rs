//! Run manifests: the total record of a command that produced files —
//! the resolved parameters, the tool version, the wall time, and every
//! output path. Written next to the primary output as
//! `<output>.manifest.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::Config;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

/// Collects parameters while the command runs, then writes the manifest
/// once the outputs exist.
pub struct ManifestBuilder {
    command: String,
    parameters: BTreeMap<String, String>,
    start: Instant,
}

impl ManifestBuilder {
    /// Starts the clock; the resolved configuration is always part of
    /// the parameter record.
    pub fn new(command: &str, config: &Config) -> Self {
        let mut parameters = BTreeMap::new();
        for (k, v) in config.manifest_entries() {
            parameters.insert(k, v);
        }
        ManifestBuilder { command: command.to_string(), parameters, start: Instant::now() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Write `<primary>.manifest.json` listing `outputs` (the primary
    /// path first). Every listed file must already exist.
    pub fn write(self, primary: &Path, outputs: &[PathBuf]) -> Result<PathBuf, CliError> {
        for path in outputs {
            if !path.exists() {
                return Err(CliError::Internal(format!(
                    "manifest lists missing output {}",
                    path.display()
                )));
            }
        }
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: self.start.elapsed().as_secs_f64(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        };
        let mut name = primary
            .file_name()
            .ok_or_else(|| CliError::User(format!("bad output path {}", primary.display())))?
            .to_os_string();
        name.push(".manifest.json");
        let path = primary.with_file_name(name);
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Internal(format!("manifest serialization: {e}")))?;
        std::fs::write(&path, json + "\n")
            .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))?;
        Ok(path)
    }
}
