//! Reproduction records embedded in every output file.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to rerun a command. Wall time is deliberately absent:
/// it goes to stderr so that reruns are byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(seed: Option<u64>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: std::env::args().skip(1).collect(),
            inputs: Vec::new(),
            seed,
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.record(path.display().to_string(), &text);
        Ok(text)
    }

    pub fn record(&mut self, path: String, text: &str) {
        self.inputs.push(InputDigest { path, sha256: sha256_hex(text.as_bytes()) });
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("manifest serializes")
    }

    /// One comment line for the plain-text formats.
    pub fn comment(&self) -> String {
        format!("# manifest {}\n", serde_json::to_string(self).expect("manifest serializes"))
    }
}
