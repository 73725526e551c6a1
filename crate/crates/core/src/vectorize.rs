//! TF-IDF sparse vectors, dense embeddings and the hybrid fused
//! representation.
//!
//! TF-IDF weights are `(count(t, d) / |d|) * log(N / df(t))` with no
//! smoothing: the vocabulary is always built over the corpus being scored, so
//! `df >= 1`. Terms present in every document get weight zero and are left out
//! of the sparse entries.
//!
//! The hybrid representation concatenates the unit-normalized TF-IDF part
//! scaled by `sqrt(alpha)` with the unit-normalized embedding part scaled by
//! `sqrt(1 - alpha)`. The concatenation has unit norm, and the cosine between
//! two hybrid vectors is exactly `alpha * cos_tfidf + (1 - alpha) * cos_embed`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{ProfileId, TokenDocument};

#[derive(Debug, thiserror::Error)]
pub enum VectorizeError {
    #[error("cannot build a vocabulary: {0}")]
    EmptyCorpus(&'static str),
    #[error("no embedding for profile `{0}`")]
    MissingEmbedding(ProfileId),
    #[error("embedding file line {line}: dimension {found}, expected {expected}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("embedding file line {line}: {message}")]
    BadEmbeddingLine { line: usize, message: String },
    #[error("embedding file has no vectors")]
    EmptyEmbeddingFile,
    #[error("{0} part of the hybrid vector has zero norm")]
    ZeroNorm(&'static str),
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("unknown {kind} `{value}`")]
    UnknownName { kind: &'static str, value: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// One of the three representations compared throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Tfidf,
    Embedding,
    Hybrid,
}

impl Technique {
    pub const ALL: [Technique; 3] = [Technique::Tfidf, Technique::Embedding, Technique::Hybrid];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Tfidf => "tfidf",
            Technique::Embedding => "embedding",
            Technique::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = VectorizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tfidf" | "tf-idf" => Ok(Technique::Tfidf),
            "embedding" | "bert" | "dense" => Ok(Technique::Embedding),
            "hybrid" => Ok(Technique::Hybrid),
            other => Err(VectorizeError::UnknownName { kind: "technique", value: other.to_string() }),
        }
    }
}

/// Logarithm used for IDF. Cosine similarities do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Base10,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Base10 => x.log10(),
        }
    }
}

/// Corpus vocabulary with document frequencies. Indices follow the sorted
/// order of the terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_to_index: HashMap<String, usize>,
    document_frequency: Vec<usize>,
    n_documents: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.document_frequency[i])
    }

    pub fn idf(&self, index: usize, base: LogBase) -> f64 {
        base.log(self.n_documents as f64 / self.document_frequency[index] as f64)
    }
}

/// Builds the vocabulary over `docs`. Document frequency counts documents,
/// not occurrences.
pub fn build_vocabulary(docs: &[TokenDocument]) -> Result<Vocabulary, VectorizeError> {
    if docs.is_empty() {
        return Err(VectorizeError::EmptyCorpus("no documents"));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.tokens.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for term in seen {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    if df.is_empty() {
        return Err(VectorizeError::EmptyCorpus("every document is empty"));
    }
    let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
    let term_to_index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary { terms, term_to_index, document_frequency: df.into_values().collect(), n_documents: docs.len() })
}

/// Sparse vector with entries sorted by strictly increasing index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    dimension: usize,
}

impl SparseVector {
    /// Sorts `entries` by index; duplicate indices are summed and zeros dropped.
    pub fn new(mut entries: Vec<(usize, f64)>, dimension: usize) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            debug_assert!(i < dimension);
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        Self { entries: merged, dimension }
    }

    pub fn zeros(dimension: usize) -> Self {
        Self { entries: Vec::new(), dimension }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w * factor)).filter(|e| e.1 != 0.0).collect(),
            dimension: self.dimension,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }
}

/// Fixed-width dense vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector {
    values: Vec<f64>,
}

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn dot(&self, other: &DenseVector) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> DenseVector {
        DenseVector { values: self.values.iter().map(|v| v * factor).collect() }
    }
}

/// Weighted concatenation of a TF-IDF part and an embedding part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridVector {
    pub tfidf_part: SparseVector,
    pub embed_part: DenseVector,
    pub alpha: f64,
}

impl HybridVector {
    pub fn dot(&self, other: &HybridVector) -> f64 {
        self.tfidf_part.dot(&other.tfidf_part) + self.embed_part.dot(&other.embed_part)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dimension(&self) -> usize {
        self.tfidf_part.dimension() + self.embed_part.dimension()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = self.tfidf_part.to_dense();
        out.extend_from_slice(self.embed_part.values());
        out
    }
}

/// TF-IDF vector of `doc` over `vocab` with natural-log IDF.
///
/// Tokens missing from the vocabulary still count towards `|d|` but get no
/// entry. An empty document yields the zero vector.
pub fn tfidf_vector(doc: &TokenDocument, vocab: &Vocabulary) -> SparseVector {
    tfidf_vector_with_base(doc, vocab, LogBase::Natural)
}

pub fn tfidf_vector_with_base(doc: &TokenDocument, vocab: &Vocabulary, base: LogBase) -> SparseVector {
    if doc.tokens.is_empty() {
        return SparseVector::zeros(vocab.len());
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for token in &doc.tokens {
        if let Some(i) = vocab.index_of(token) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    let total = doc.tokens.len() as f64;
    let entries =
        counts.into_iter().map(|(i, c)| (i, (c as f64 / total) * vocab.idf(i, base))).filter(|e| e.1 != 0.0).collect();
    SparseVector { entries, dimension: vocab.len() }
}

/// Unit-normalizes both parts and weights them by `sqrt(alpha)` and
/// `sqrt(1 - alpha)`.
pub fn hybrid_vector(tfidf: &SparseVector, embed: &DenseVector, alpha: f64) -> Result<HybridVector, VectorizeError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(VectorizeError::AlphaOutOfRange(alpha));
    }
    let tn = tfidf.norm();
    if tn == 0.0 {
        return Err(VectorizeError::ZeroNorm("tfidf"));
    }
    let en = embed.norm();
    if en == 0.0 {
        return Err(VectorizeError::ZeroNorm("embedding"));
    }
    Ok(HybridVector {
        tfidf_part: tfidf.scaled(alpha.sqrt() / tn),
        embed_part: embed.scaled((1.0 - alpha).sqrt() / en),
        alpha,
    })
}

/// Like [`hybrid_vector`] but a zero part is kept as zero instead of failing.
/// Used at corpus level, where the caller reports such profiles as degenerate.
pub fn hybrid_vector_lenient(
    tfidf: &SparseVector,
    embed: &DenseVector,
    alpha: f64,
) -> Result<HybridVector, VectorizeError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(VectorizeError::AlphaOutOfRange(alpha));
    }
    let tn = tfidf.norm();
    let en = embed.norm();
    Ok(HybridVector {
        tfidf_part: if tn > 0.0 { tfidf.scaled(alpha.sqrt() / tn) } else { SparseVector::zeros(tfidf.dimension()) },
        embed_part: if en > 0.0 { embed.scaled((1.0 - alpha).sqrt() / en) } else { embed.clone() },
        alpha,
    })
}

/// Any of the three representations, so that corpora can be handled
/// uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileVector {
    Sparse(SparseVector),
    Dense(DenseVector),
    Hybrid(HybridVector),
}

impl ProfileVector {
    /// Dot product, or `None` when the two sides use different representations
    /// or dimensions.
    pub fn dot(&self, other: &ProfileVector) -> Option<f64> {
        match (self, other) {
            (ProfileVector::Sparse(a), ProfileVector::Sparse(b)) if a.dimension() == b.dimension() => Some(a.dot(b)),
            (ProfileVector::Dense(a), ProfileVector::Dense(b)) if a.dimension() == b.dimension() => Some(a.dot(b)),
            (ProfileVector::Hybrid(a), ProfileVector::Hybrid(b)) if a.dimension() == b.dimension() => Some(a.dot(b)),
            _ => None,
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            ProfileVector::Sparse(v) => v.dot(v),
            ProfileVector::Dense(v) => v.dot(v),
            ProfileVector::Hybrid(v) => v.dot(v),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ProfileVector::Sparse(v) => v.dimension(),
            ProfileVector::Dense(v) => v.dimension(),
            ProfileVector::Hybrid(v) => v.dimension(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            ProfileVector::Sparse(v) => v.to_dense(),
            ProfileVector::Dense(v) => v.values().to_vec(),
            ProfileVector::Hybrid(v) => v.to_dense(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ProfileVector::Sparse(_) => "sparse",
            ProfileVector::Dense(_) => "dense",
            ProfileVector::Hybrid(_) => "hybrid",
        }
    }
}

impl From<SparseVector> for ProfileVector {
    fn from(v: SparseVector) -> Self {
        ProfileVector::Sparse(v)
    }
}

impl From<DenseVector> for ProfileVector {
    fn from(v: DenseVector) -> Self {
        ProfileVector::Dense(v)
    }
}

impl From<HybridVector> for ProfileVector {
    fn from(v: HybridVector) -> Self {
        ProfileVector::Hybrid(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    FileImport,
    HashedProjection,
}

impl FromStr for ProviderKind {
    type Err = VectorizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "file_import" | "file" => Ok(ProviderKind::FileImport),
            "hashed_projection" | "hashed" => Ok(ProviderKind::HashedProjection),
            other => Err(VectorizeError::UnknownName { kind: "embedding provider", value: other.to_string() }),
        }
    }
}

/// Source of dense profile embeddings.
pub trait EmbeddingProvider: Send + Sync {
    fn kind(&self) -> ProviderKind;

    fn dimension(&self) -> usize;

    /// Embeds one profile. `text` is the preprocessed (unstemmed) profile
    /// text; `id` identifies the profile for providers keyed by id.
    fn embed(&self, id: &ProfileId, text: &str) -> Result<DenseVector, VectorizeError>;
}

/// Embeddings imported from a JSON-lines file of `{"id": ..., "vector": [...]}`.
#[derive(Debug, Clone)]
pub struct FileImportProvider {
    vectors: HashMap<ProfileId, DenseVector>,
    dimension: usize,
}

#[derive(Deserialize)]
struct EmbeddingLine {
    id: String,
    vector: Vec<f64>,
}

impl FileImportProvider {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, VectorizeError> {
        let mut vectors = HashMap::new();
        let mut dimension = None;
        for (n, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: EmbeddingLine = serde_json::from_str(&line)
                .map_err(|e| VectorizeError::BadEmbeddingLine { line: line_no, message: e.to_string() })?;
            if parsed.vector.iter().any(|v| !v.is_finite()) {
                return Err(VectorizeError::BadEmbeddingLine { line: line_no, message: "non-finite value".into() });
            }
            let expected = *dimension.get_or_insert(parsed.vector.len());
            if parsed.vector.len() != expected {
                return Err(VectorizeError::DimensionMismatch { line: line_no, expected, found: parsed.vector.len() });
            }
            vectors.insert(ProfileId(parsed.id), DenseVector::new(parsed.vector));
        }
        let dimension = dimension.ok_or(VectorizeError::EmptyEmbeddingFile)?;
        Ok(Self { vectors, dimension })
    }

    pub fn from_path(path: &Path) -> Result<Self, VectorizeError> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for FileImportProvider {
    fn kind(&self) -> ProviderKind {
        ProviderKind::FileImport
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, id: &ProfileId, _text: &str) -> Result<DenseVector, VectorizeError> {
        self.vectors.get(id).cloned().ok_or_else(|| VectorizeError::MissingEmbedding(id.clone()))
    }
}

/// Deterministic stand-in embedding: whitespace tokens are feature-hashed
/// (FNV-1a, 64-bit) into `buckets` counts, and every bucket owns a Gaussian
/// projection row of width `dimension` derived from `seed` and the bucket
/// index. The embedding is the count-weighted sum of rows.
///
/// Two distinct tokens collide with probability `1 / buckets` (about 1.5e-5
/// at the default 2^16 buckets).
#[derive(Debug, Clone)]
pub struct HashedProjectionProvider {
    dimension: usize,
    buckets: u64,
    seed: u64,
}

impl HashedProjectionProvider {
    pub const DEFAULT_DIMENSION: usize = 256;
    pub const DEFAULT_BUCKETS: u64 = 1 << 16;

    pub fn new(dimension: usize, seed: u64) -> Self {
        Self::with_buckets(dimension, Self::DEFAULT_BUCKETS, seed)
    }

    pub fn with_buckets(dimension: usize, buckets: u64, seed: u64) -> Self {
        assert!(dimension > 0 && buckets > 0);
        Self { dimension, buckets, seed }
    }

    pub fn bucket(&self, token: &str) -> u64 {
        fnv1a(token.as_bytes()) % self.buckets
    }

    fn row(&self, bucket: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ splitmix64(bucket)));
        let scale = 1.0 / (self.dimension as f64).sqrt();
        (0..self.dimension)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * scale
            })
            .collect()
    }
}

impl EmbeddingProvider for HashedProjectionProvider {
    fn kind(&self) -> ProviderKind {
        ProviderKind::HashedProjection
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, _id: &ProfileId, text: &str) -> Result<DenseVector, VectorizeError> {
        let mut counts: BTreeMap<u64, f64> = BTreeMap::new();
        for token in text.split_whitespace() {
            *counts.entry(self.bucket(&token.to_lowercase())).or_insert(0.0) += 1.0;
        }
        let mut values = vec![0.0; self.dimension];
        for (bucket, count) in counts {
            for (v, r) in values.iter_mut().zip(self.row(bucket)) {
                *v += count * r;
            }
        }
        Ok(DenseVector::new(values))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
