//! Run configuration: a TOML file, then command-line overrides.

use std::path::{Path, PathBuf};

use collabrec_core::simcluster::{AffinityConfig, Preference};
use collabrec_core::vectorize::Technique;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Where profiles come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusSource {
    /// The bundled 200-profile corpus.
    Demo,
    /// Generated on the fly from the skill pool and the run seed.
    Synthetic,
    /// A CSV or JSON-lines file.
    #[serde(untagged)]
    File(PathBuf),
}

impl CorpusSource {
    pub fn parse(s: &str) -> Self {
        match s {
            "demo" => CorpusSource::Demo,
            "synthetic" => CorpusSource::Synthetic,
            path => CorpusSource::File(PathBuf::from(path)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingSource {
    /// Bundled embeddings; only valid with the demo corpus.
    Demo,
    /// JSON-lines file given by `embeddings.path`.
    File,
    /// Seeded hashed random projection.
    Hashed,
}

impl EmbeddingSource {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "demo" => Ok(EmbeddingSource::Demo),
            "file" | "file_import" => Ok(EmbeddingSource::File),
            "hashed" | "hashed_projection" => Ok(EmbeddingSource::Hashed),
            other => Err(CliError::Validation(format!("unknown embedding provider `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub source: CorpusSource,
    pub synthetic_count: usize,
    /// Skill pool JSON for synthetic generation; builtin when absent.
    pub pool: Option<PathBuf>,
    /// One stop word per line; the builtin English list when absent.
    pub stopwords: Option<PathBuf>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { source: CorpusSource::Demo, synthetic_count: 200, pool: None, stopwords: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    /// Defaults to `demo` for the demo corpus and `hashed` otherwise.
    pub provider: Option<EmbeddingSource>,
    pub path: Option<PathBuf>,
    /// Width of hashed-projection embeddings.
    pub dimension: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self { provider: None, path: None, dimension: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VectorizeConfig {
    /// Weight of the TF-IDF side in the hybrid representation.
    pub alpha: f64,
}

impl Default for VectorizeConfig {
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub damping: f64,
    pub max_iter: usize,
    pub convergence_iter: usize,
    /// `"median"` or a number.
    pub preference: PreferenceSetting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PreferenceSetting {
    Value(f64),
    Named(NamedPreference),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedPreference {
    Median,
}

impl PreferenceSetting {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s.eq_ignore_ascii_case("median") {
            return Ok(PreferenceSetting::Named(NamedPreference::Median));
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(PreferenceSetting::Value)
            .ok_or_else(|| CliError::Validation(format!("preference must be `median` or a number, got `{s}`")))
    }
}

impl Default for ClusterConfig {
    fn default() -> Self {
        let d = AffinityConfig::default();
        Self {
            damping: d.damping,
            max_iter: d.max_iter,
            convergence_iter: d.convergence_iter,
            preference: PreferenceSetting::Named(NamedPreference::Median),
        }
    }
}

impl ClusterConfig {
    pub fn affinity(&self) -> AffinityConfig {
        AffinityConfig {
            damping: self.damping,
            max_iter: self.max_iter,
            convergence_iter: self.convergence_iter,
            preference: match self.preference {
                PreferenceSetting::Value(v) => Preference::Value(v),
                PreferenceSetting::Named(NamedPreference::Median) => Preference::Median,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub methods: Vec<Technique>,
    pub ndcg_depth: usize,
    pub top_k: usize,
    /// Targets for exported recommendations; the first profile when empty.
    pub targets: Vec<String>,
    pub out: PathBuf,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self { methods: Technique::ALL.to_vec(), ndcg_depth: 5, top_k: 5, targets: Vec::new(), out: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeSection {
    pub addr: String,
    pub store: PathBuf,
    /// Load the configured corpus as account-less profiles on start.
    pub import_corpus: bool,
}

impl Default for ServeSection {
    fn default() -> Self {
        Self { addr: "127.0.0.1:8080".into(), store: "store".into(), import_corpus: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub corpus: CorpusConfig,
    pub embeddings: EmbeddingConfig,
    pub vectorize: VectorizeConfig,
    pub cluster: ClusterConfig,
    pub experiment: ExperimentSection,
    pub serve: ServeSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: collabrec_core::demo::SEED,
            corpus: CorpusConfig::default(),
            embeddings: EmbeddingConfig::default(),
            vectorize: VectorizeConfig::default(),
            cluster: ClusterConfig::default(),
            experiment: ExperimentSection::default(),
            serve: ServeSection::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Runtime(format!("reading config {}: {e}", p.display())))?;
                Self::from_toml(&text)
            }
        }
    }

    /// Effective embedding source.
    pub fn embedding_source(&self) -> EmbeddingSource {
        self.embeddings.provider.unwrap_or(match self.corpus.source {
            CorpusSource::Demo => EmbeddingSource::Demo,
            _ if self.embeddings.path.is_some() => EmbeddingSource::File,
            _ => EmbeddingSource::Hashed,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if !(0.0..=1.0).contains(&self.vectorize.alpha) {
            return bad(format!("alpha must be in [0, 1], got {}", self.vectorize.alpha));
        }
        if !(0.5..1.0).contains(&self.cluster.damping) {
            return bad(format!("damping must be in [0.5, 1), got {}", self.cluster.damping));
        }
        if self.cluster.max_iter == 0 || self.cluster.convergence_iter == 0 {
            return bad("max_iter and convergence_iter must be positive".into());
        }
        if self.experiment.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if self.experiment.ndcg_depth == 0 || self.experiment.top_k == 0 {
            return bad("ndcg_depth and top_k must be positive".into());
        }
        if self.embeddings.dimension == 0 {
            return bad("embedding dimension must be positive".into());
        }
        if self.corpus.synthetic_count == 0 {
            return bad("synthetic_count must be positive".into());
        }
        match self.embedding_source() {
            EmbeddingSource::Demo if self.corpus.source != CorpusSource::Demo => {
                bad("demo embeddings only cover the demo corpus".into())
            }
            EmbeddingSource::File if self.embeddings.path.is_none() => {
                bad("embedding provider `file` needs embeddings.path".into())
            }
            _ => Ok(()),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}
