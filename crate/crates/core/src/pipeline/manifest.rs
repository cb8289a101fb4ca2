use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluation::METRIC_CONVENTIONS;
use crate::operators::CSM_SUPPORT_THRESHOLD;
use crate::util::GENERATOR_ID;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance record written next to every subcommand's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seeds: Vec<u64>,
    pub generator: String,
    pub csm_support_threshold: f64,
    pub metric_conventions: String,
    /// sha256 of each input file, keyed by path relative to its root.
    pub inputs: BTreeMap<String, String>,
    /// sha256 of each output file, keyed by path relative to `--out`.
    pub outputs: BTreeMap<String, String>,
    /// Subcommand-specific extras such as solver logs.
    #[serde(default)]
    pub details: serde_json::Value,
}

impl RunManifest {
    pub fn new(subcommand: &str, params: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            params,
            seeds,
            generator: GENERATOR_ID.to_string(),
            csm_support_threshold: CSM_SUPPORT_THRESHOLD,
            metric_conventions: METRIC_CONVENTIONS.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn add_inputs(&mut self, root: &Path, files: &[impl AsRef<Path>]) -> Result<()> {
        for f in files {
            let f = f.as_ref();
            self.inputs.insert(relative(root, f), sha256_file(f)?);
        }
        Ok(())
    }

    pub fn add_outputs(&mut self, root: &Path, files: &[impl AsRef<Path>]) -> Result<()> {
        for f in files {
            let f = f.as_ref();
            self.outputs.insert(relative(root, f), sha256_file(f)?);
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let body = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn relative(root: &Path, f: &Path) -> String {
    f.strip_prefix(root)
        .unwrap_or(f)
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
