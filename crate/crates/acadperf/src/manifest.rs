use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use acadperf_core::regress::ModelSpec;
use acadperf_core::sim::SimConfig;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};
use crate::io::write_file;

/// Resolved configuration of one command, written next to its outputs so the
/// run can be replayed. Contains nothing time- or host-dependent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census_date: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention_override: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded_doc_types: Vec<String>,
    pub strict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
}

impl RunManifest {
    pub fn new(command: &str, output_dir: &Path) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            inputs: BTreeMap::new(),
            census_date: None,
            window: None,
            convention_override: None,
            excluded_doc_types: Vec::new(),
            strict: false,
            model: None,
            simulation: None,
            runs: None,
            seed: None,
            output_dir: output_dir.to_path_buf(),
        }
    }

    pub fn input(mut self, name: &str, path: Option<&Path>) -> Self {
        if let Some(p) = path {
            self.inputs.insert(name.into(), p.to_path_buf());
        }
        self
    }

    /// Every input must exist before anything runs.
    pub fn check_inputs(&self) -> Result<()> {
        let missing: Vec<String> = self
            .inputs
            .iter()
            .filter(|(_, p)| !p.exists())
            .map(|(name, p)| format!("{name} file {} not found", p.display()))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(AppError::Usage(missing.join("; ")))
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.manifest.json", self.command)
    }

    pub fn write(&self) -> Result<PathBuf> {
        let path = self.output_dir.join(self.file_name());
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| AppError::format(&path, e))?;
        text.push('\n');
        write_file(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = crate::io::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| AppError::format(path, e))
    }
}
