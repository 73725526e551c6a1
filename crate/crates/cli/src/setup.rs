//! Turning a [`Config`] into profiles, stop words and an embedding provider.

use std::path::Path;

use collabrec_core::corpus::{generate_synthetic, load_profiles, CorpusError, Profile, SkillPool, StopWords};
use collabrec_core::demo;
use collabrec_core::index::{CorpusIndex, IndexError};
use collabrec_core::vectorize::{EmbeddingProvider, FileImportProvider, HashedProjectionProvider};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Config, CorpusSource, EmbeddingSource};
use crate::CliError;

/// What the corpus was loaded from, for manifests.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusInfo {
    pub source: String,
    pub profiles: usize,
    /// SHA-256 of the profiles in CSV form.
    pub sha256: String,
    pub embeddings: String,
}

pub fn corpus_error(e: CorpusError) -> CliError {
    match e {
        CorpusError::Io(_) => CliError::Runtime(e.to_string()),
        CorpusError::InvalidRecords(records) => {
            let lines: Vec<String> = records.iter().map(|r| format!("  {r}")).collect();
            CliError::Validation(format!("{} invalid record(s):\n{}", records.len(), lines.join("\n")))
        }
        other => CliError::Validation(other.to_string()),
    }
}

/// A user-named input that does not exist is invalid input, not a runtime
/// failure.
pub fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("no such file: {}", path.display())))
    }
}

pub fn load_pool(config: &Config) -> Result<SkillPool, CliError> {
    match &config.corpus.pool {
        None => Ok(SkillPool::builtin()),
        Some(p) => {
            require_file(p)?;
            SkillPool::from_path(p).map_err(corpus_error)
        }
    }
}

pub fn load_stopwords(config: &Config) -> Result<StopWords, CliError> {
    match &config.corpus.stopwords {
        None => Ok(StopWords::english()),
        Some(p) => {
            require_file(p)?;
            StopWords::from_path(p).map_err(|e| CliError::Runtime(format!("reading {}: {e}", p.display())))
        }
    }
}

pub fn load_corpus(config: &Config) -> Result<Vec<Profile>, CliError> {
    match &config.corpus.source {
        CorpusSource::Demo => Ok(demo::profiles()),
        CorpusSource::Synthetic => {
            generate_synthetic(&load_pool(config)?, config.corpus.synthetic_count, config.seed).map_err(corpus_error)
        }
        CorpusSource::File(path) => {
            require_file(path)?;
            load_profiles(path).map_err(corpus_error)
        }
    }
}

pub fn provider(config: &Config) -> Result<Box<dyn EmbeddingProvider>, CliError> {
    Ok(match config.embedding_source() {
        EmbeddingSource::Demo => Box::new(demo::embeddings()),
        EmbeddingSource::Hashed => Box::new(HashedProjectionProvider::new(config.embeddings.dimension, config.seed)),
        EmbeddingSource::File => {
            let path = config.embeddings.path.as_deref().expect("validated");
            Box::new(
                FileImportProvider::from_path(path)
                    .map_err(|e| CliError::Validation(format!("embeddings {}: {e}", path.display())))?,
            )
        }
    })
}

pub fn index_error(e: IndexError) -> CliError {
    CliError::Validation(e.to_string())
}

/// Loads everything and builds the vectorized corpus.
pub fn build_index(config: &Config) -> Result<(CorpusIndex, CorpusInfo), CliError> {
    config.validate()?;
    let profiles = load_corpus(config)?;
    let stopwords = load_stopwords(config)?;
    let provider = provider(config)?;
    let info = CorpusInfo {
        source: match &config.corpus.source {
            CorpusSource::Demo => "demo".into(),
            CorpusSource::Synthetic => format!("synthetic({}, seed {})", config.corpus.synthetic_count, config.seed),
            CorpusSource::File(p) => p.display().to_string(),
        },
        profiles: profiles.len(),
        sha256: profiles_digest(&profiles)?,
        embeddings: match config.embedding_source() {
            EmbeddingSource::Demo => "demo".into(),
            EmbeddingSource::Hashed => format!("hashed({}, seed {})", config.embeddings.dimension, config.seed),
            EmbeddingSource::File => {
                config.embeddings.path.as_deref().map(Path::display).expect("validated").to_string()
            }
        },
    };
    let index =
        CorpusIndex::build(profiles, &stopwords, provider.as_ref(), config.vectorize.alpha).map_err(index_error)?;
    Ok((index, info))
}

fn profiles_digest(profiles: &[Profile]) -> Result<String, CliError> {
    let mut csv = Vec::new();
    collabrec_core::corpus::write_profiles_csv(&mut csv, profiles).map_err(corpus_error)?;
    Ok(hex::encode(Sha256::digest(csv)))
}
