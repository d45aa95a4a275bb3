//! Reproducibility envelope attached to every CLI report.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Everything that determines a run's numeric output. Deliberately carries no
/// timestamp, so identical invocations serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub parameters: Map<String, Value>,
    /// SHA-256 over the canonical input bytes, hex encoded.
    pub input_hash: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            parameters: Map::new(),
            input_hash: String::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn hash_input(mut self, bytes: &[u8]) -> Self {
        self.input_hash = sha256_hex(bytes);
        self
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
