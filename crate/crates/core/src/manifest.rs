//! Run manifests: parameters, input digests and produced artifacts, enough
//! to reproduce a run exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// SHA-256 of a file's contents, hex encoded.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub parameters: serde_json::Value,
    /// Input role → SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    /// Artifact file name → SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, parameters: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            parameters,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, role: &str, path: &Path) -> Result<()> {
        self.inputs.insert(role.to_string(), file_digest(path)?);
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.outputs.insert(name, file_digest(path)?);
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json =
            serde_json::to_string_pretty(self).map_err(|e| Error::Corruption(e.to_string()))?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }
}
