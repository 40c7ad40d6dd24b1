//! Provenance record written next to every command's outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::Context;
use capa_bench::generator::{sha256_hex, SamplingConfig};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct AdapterRecord {
    pub mode: String,
    pub batch_size: usize,
    pub max_in_flight: usize,
    pub timeout_secs: u64,
    pub attempts: u32,
    pub backoff_ms: u64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<SamplingConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capability: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adapter: Option<AdapterRecord>,
    pub out_dir: String,
    /// Input name to SHA-256 of its content.
    pub inputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &'static str, out_dir: &Path) -> Self {
        RunManifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            corpus: None,
            lexicon: None,
            config: None,
            capability: None,
            adapter: None,
            out_dir: out_dir.display().to_string(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, name: &str, content: &[u8]) {
        self.inputs.insert(name.to_string(), sha256_hex(content));
    }

    /// Writes `<command>.manifest.json` into the output directory, creating
    /// it. Called before any other output is written.
    pub fn write(&self) -> anyhow::Result<()> {
        let dir = Path::new(&self.out_dir);
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}.manifest.json", self.command));
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    }
}
