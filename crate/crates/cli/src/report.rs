//! Versioned run reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::docs::FORMAT_VERSION;

/// Hashes every input that determines a report.
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(subcommand: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(subcommand.as_bytes());
        Inputs { hasher }
    }

    pub fn add(&mut self, name: &str, bytes: impl AsRef<[u8]>) {
        let bytes = bytes.as_ref();
        self.hasher.update([0]);
        self.hasher.update(name.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    fn digest(self) -> String {
        format!("{:x}", self.hasher.finalize())
    }
}

#[derive(Serialize)]
pub struct Report {
    pub version: u64,
    pub subcommand: String,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Value,
    /// Flags recomputed from `outputs` before emission.
    pub exactness: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub struct Builder {
    subcommand: String,
    pub inputs: Inputs,
    seed: Option<u64>,
    exactness: BTreeMap<String, bool>,
    started: Instant,
}

impl Builder {
    pub fn new(subcommand: &str) -> Self {
        Builder {
            subcommand: subcommand.to_string(),
            inputs: Inputs::new(subcommand),
            seed: None,
            exactness: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn input(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> &mut Self {
        self.inputs.add(name, bytes);
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self.inputs.add("seed", seed.to_le_bytes());
        self
    }

    pub fn flag(&mut self, name: &str, value: bool) -> &mut Self {
        self.exactness.insert(name.to_string(), value);
        self
    }

    pub fn all_exact(&self) -> bool {
        self.exactness.values().all(|&v| v)
    }

    pub fn finish(self, outputs: Value, timing: bool) -> Report {
        let timing_ms = timing.then(|| self.started.elapsed().as_secs_f64() * 1e3);
        Report {
            version: FORMAT_VERSION,
            subcommand: self.subcommand,
            inputs_digest: self.inputs.digest(),
            seed: self.seed,
            outputs,
            exactness: self.exactness,
            timing_ms,
        }
    }
}
