//! Machine-readable run reports emitted by the command-line frontend.
//! Every invocation — success or failure — produces one of these; the
//! bundled JSON schema in `schemas/report.schema.json` pins the format.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunReport {
    /// Subcommand name as invoked.
    pub command: String,
    /// Input files and inline parameters, as `key=value` strings.
    pub inputs: Vec<String>,
    /// Named wall-clock timings in milliseconds.
    pub timings: BTreeMap<String, u64>,
    /// One-word outcome ("ok", "Solves", "width=2", error kind, ...).
    pub outcome: String,
    /// Extra outcome detail for humans; mirrored on stdout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Paths of files the command wrote.
    pub artifacts: Vec<String>,
    /// Crate version stamp.
    pub version: String,
    /// RNG seed the run was started with.
    pub seed: u64,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            timings: BTreeMap::new(),
            outcome: String::new(),
            detail: None,
            artifacts: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }

    pub fn input(&mut self, key: &str, value: impl std::fmt::Display) {
        self.inputs.push(format!("{key}={value}"));
    }

    pub fn timing(&mut self, name: &str, ms: u64) {
        self.timings.insert(name.to_string(), ms);
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), ReportError> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}
