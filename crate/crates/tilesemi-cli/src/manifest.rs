use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};
use tilesemi::substitution::config::builtin_text;

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub system: String,
    /// Hex SHA-256 of the config text.
    pub sha256: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub arguments: Vec<String>,
    pub input: InputRecord,
    pub outputs: Vec<String>,
    pub exit_code: u8,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn config_hash(system: &str) -> Option<String> {
    match builtin_text(system) {
        Some(text) => Some(sha256_hex(text.as_bytes())),
        None => std::fs::read(system).ok().map(|b| sha256_hex(&b)),
    }
}

impl RunManifest {
    pub fn new(system: &str, arguments: Vec<String>, outputs: Vec<PathBuf>, exit_code: u8) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            arguments,
            input: InputRecord { system: system.to_string(), sha256: config_hash(system) },
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            exit_code,
        }
    }
}
