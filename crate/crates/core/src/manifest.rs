//! Run manifests: one JSON line per command invocation.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputHash>,
    pub seed: Option<u64>,
    pub version: String,
    /// Milliseconds since the Unix epoch.
    pub started_ms: u64,
    pub finished_ms: u64,
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: impl AsRef<Path>) -> Result<InputHash> {
    let path = path.as_ref();
    Ok(InputHash {
        path: path.display().to_string(),
        sha256: sha256_hex(&fs::read(path)?),
    })
}

impl RunManifest {
    pub fn start(command: &str, args: Vec<String>, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            args,
            config: serde_json::Value::Null,
            inputs: Vec::new(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_ms: now_ms(),
            finished_ms: 0,
        }
    }

    pub fn wall_ms(&self) -> u64 {
        self.finished_ms.saturating_sub(self.started_ms)
    }

    /// Stamps the finish time and appends the record to `path`.
    pub fn finish(mut self, path: impl AsRef<Path>) -> Result<Self> {
        self.finished_ms = now_ms();
        let mut line = serde_json::to_string(&self).expect("manifest serializes");
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(line.as_bytes())?;
        Ok(self)
    }

    /// Last record of a manifest file.
    pub fn read_last(path: impl AsRef<Path>) -> Result<Option<Self>> {
        let text = fs::read_to_string(path)?;
        match text.lines().rev().find(|l| !l.trim().is_empty()) {
            None => Ok(None),
            Some(line) => serde_json::from_str(line)
                .map(Some)
                .map_err(|e| crate::error::Error::parse(0, format!("manifest: {e}"))),
        }
    }
}
