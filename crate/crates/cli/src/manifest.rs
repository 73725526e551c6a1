//! Run manifests: everything needed to reproduce a run's outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::setup::CorpusInfo;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub config_hash: String,
    pub config: &'a Config,
    pub versions: BTreeMap<&'static str, &'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<&'a CorpusInfo>,
    /// File name to SHA-256 of its contents.
    pub artifacts: BTreeMap<String, String>,
}

pub fn versions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("collabrec-cli", env!("CARGO_PKG_VERSION")),
        ("collabrec-core", collabrec_core::VERSION),
        ("collabrec-matchsvc", collabrec_matchsvc::VERSION),
    ])
}

impl<'a> Manifest<'a> {
    pub fn new(command: &'a str, config: &'a Config, corpus: Option<&'a CorpusInfo>) -> Self {
        Self {
            command,
            seed: config.seed,
            config_hash: config.hash(),
            config,
            versions: versions(),
            corpus,
            artifacts: BTreeMap::new(),
        }
    }

    /// Records the digest of each file, keyed by file name.
    pub fn add_artifacts(&mut self, paths: &[PathBuf]) -> Result<(), CliError> {
        for p in paths {
            let bytes = std::fs::read(p).map_err(|e| CliError::Runtime(format!("reading {}: {e}", p.display())))?;
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            self.artifacts.insert(name, hex::encode(Sha256::digest(bytes)));
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut json = serde_json::to_vec_pretty(self).expect("manifest serializes");
        json.push(b'\n');
        std::fs::write(path, json).map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
    }
}
