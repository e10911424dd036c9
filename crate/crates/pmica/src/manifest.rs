//! Run manifests: every artifact the tool writes embeds the command, the
//! fully resolved configuration, digests of its file inputs, and the seed,
//! so a run can be reproduced exactly. Two runs with equal manifests
//! (duration aside) produce identical numerical output.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub input_digests: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            input_digests: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: 0.0,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.input_digests
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn set_duration(&mut self, started: Instant) {
        self.duration_secs = started.elapsed().as_secs_f64();
    }

    /// Digest of the manifest content excluding duration; identifies the run
    /// inputs, not the wall clock.
    pub fn digest(&self) -> String {
        let mut stripped = self.clone();
        stripped.duration_secs = 0.0;
        let bytes = serde_json::to_vec(&stripped).expect("manifest serializes");
        short_digest(&bytes)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Truncated hex digest of arbitrary bytes (12 hex chars).
pub fn short_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())[..12].to_string()
}
