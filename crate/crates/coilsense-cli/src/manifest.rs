//! Run manifests: each output directory gets exactly one `manifest.json`
//! recording the command, input digests, seed and produced files. The
//! manifest has no timestamps, so identical runs produce identical bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FORMAT: &str = "coilsense/manifest/v1";

#[derive(Serialize)]
pub struct RunManifest {
    format: &'static str,
    command: String,
    args: Vec<String>,
    tool_version: &'static str,
    seed: Option<u64>,
    config_digest: Option<String>,
    input_digests: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            format: MANIFEST_FORMAT,
            command: command.to_string(),
            // skip argv[0]: the binary's path is not part of the run identity
            args: std::env::args().skip(1).collect(),
            tool_version: env!("CARGO_PKG_VERSION"),
            seed: None,
            config_digest: None,
            input_digests: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn config_digest(mut self, path: &Path) -> anyhow::Result<Self> {
        self.config_digest = Some(file_digest(path)?);
        Ok(self)
    }

    pub fn input(mut self, path: &Path) -> anyhow::Result<Self> {
        self.input_digests
            .insert(path.display().to_string(), file_digest(path)?);
        Ok(self)
    }

    pub fn output(mut self, name: &str) -> Self {
        self.outputs.push(name.to_string());
        self
    }

    /// Writes `manifest.json` into `dir`. Call last, after all outputs.
    pub fn write(mut self, dir: &Path) -> anyhow::Result<PathBuf> {
        self.outputs.push("manifest.json".to_string());
        let path = dir.join("manifest.json");
        let file = std::fs::File::create(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(file, &self)?;
        Ok(path)
    }
}

pub fn file_digest(path: &Path) -> anyhow::Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {} for digest", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Creates the output directory if needed.
pub fn ensure_out_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(())
}
