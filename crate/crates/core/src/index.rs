//! Vectorized corpus: every profile under all three representations, plus
//! optional cluster assignments. Built once and then read-only.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{preprocess, stem_tokens, Profile, ProfileId, StopWords, TokenDocument};
use crate::simcluster::{self, AffinityConfig, ClusterAssignment, SimclusterError, SimilarityMatrix};
use crate::vectorize::{
    build_vocabulary, hybrid_vector_lenient, tfidf_vector, DenseVector, EmbeddingProvider, ProfileVector, SparseVector,
    Technique, VectorizeError, Vocabulary,
};

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("the corpus has no profiles")]
    Empty,
    #[error("duplicate profile id `{0}`")]
    DuplicateId(ProfileId),
    #[error("profile `{id}`: {source}")]
    Embedding { id: ProfileId, source: VectorizeError },
    #[error("embedding for `{id}` has dimension {found}, expected {expected}")]
    EmbeddingWidth { id: ProfileId, expected: usize, found: usize },
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error("{technique}: {source}")]
    Cluster { technique: Technique, source: SimclusterError },
}

/// Profiles whose representation is degenerate under some technique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Degenerate {
    /// No tokens left after preprocessing.
    pub empty_documents: Vec<ProfileId>,
    /// TF-IDF vector is zero (every token occurs in every document).
    pub zero_tfidf: Vec<ProfileId>,
    pub zero_embedding: Vec<ProfileId>,
}

#[derive(Debug, Clone)]
pub struct CorpusIndex {
    profiles: Vec<Profile>,
    position: HashMap<ProfileId, usize>,
    documents: Vec<TokenDocument>,
    vocabulary: Vocabulary,
    alpha: f64,
    vectors: BTreeMap<Technique, Vec<ProfileVector>>,
    clusters: BTreeMap<Technique, ClusterAssignment>,
    degenerate: Degenerate,
}

impl CorpusIndex {
    /// Preprocesses, vectorizes and fuses every profile.
    ///
    /// The TF-IDF branch works on stemmed tokens; the embedding provider sees
    /// the unstemmed preprocessed text. `alpha` weights the TF-IDF side of the
    /// hybrid representation.
    pub fn build(
        profiles: Vec<Profile>,
        stopwords: &StopWords,
        provider: &dyn EmbeddingProvider,
        alpha: f64,
    ) -> Result<Self, IndexError> {
        if profiles.is_empty() {
            return Err(IndexError::Empty);
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(VectorizeError::AlphaOutOfRange(alpha).into());
        }
        let mut position = HashMap::with_capacity(profiles.len());
        for (i, p) in profiles.iter().enumerate() {
            if position.insert(p.id.clone(), i).is_some() {
                return Err(IndexError::DuplicateId(p.id.clone()));
            }
        }

        let documents: Vec<TokenDocument> = profiles.iter().map(|p| preprocess(p, stopwords)).collect();
        let stemmed: Vec<TokenDocument> = documents.iter().map(stem_tokens).collect();
        let vocabulary = build_vocabulary(&stemmed)?;
        let tfidf: Vec<SparseVector> = stemmed.iter().map(|d| tfidf_vector(d, &vocabulary)).collect();

        let dim = provider.dimension();
        let mut embeddings: Vec<DenseVector> = Vec::with_capacity(profiles.len());
        for (p, doc) in profiles.iter().zip(&documents) {
            let e = provider
                .embed(&p.id, &doc.joined())
                .map_err(|source| IndexError::Embedding { id: p.id.clone(), source })?;
            if e.dimension() != dim {
                return Err(IndexError::EmbeddingWidth { id: p.id.clone(), expected: dim, found: e.dimension() });
            }
            embeddings.push(e);
        }

        let mut degenerate = Degenerate::default();
        for (i, p) in profiles.iter().enumerate() {
            if documents[i].is_empty() {
                degenerate.empty_documents.push(p.id.clone());
            }
            if tfidf[i].is_zero() {
                degenerate.zero_tfidf.push(p.id.clone());
            }
            if embeddings[i].is_zero() {
                degenerate.zero_embedding.push(p.id.clone());
            }
        }
        if !degenerate.zero_tfidf.is_empty() || !degenerate.zero_embedding.is_empty() {
            tracing::warn!(
                zero_tfidf = degenerate.zero_tfidf.len(),
                zero_embedding = degenerate.zero_embedding.len(),
                "degenerate profiles in corpus"
            );
        }

        let hybrid = tfidf
            .iter()
            .zip(&embeddings)
            .map(|(t, e)| hybrid_vector_lenient(t, e, alpha).map(ProfileVector::Hybrid))
            .collect::<Result<Vec<_>, _>>()?;
        let mut vectors = BTreeMap::new();
        vectors.insert(Technique::Tfidf, tfidf.into_iter().map(ProfileVector::Sparse).collect());
        vectors.insert(Technique::Embedding, embeddings.into_iter().map(ProfileVector::Dense).collect());
        vectors.insert(Technique::Hybrid, hybrid);

        Ok(Self { profiles, position, documents, vocabulary, alpha, vectors, clusters: BTreeMap::new(), degenerate })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn profile(&self, index: usize) -> &Profile {
        &self.profiles[index]
    }

    pub fn position(&self, id: &ProfileId) -> Option<usize> {
        self.position.get(id).copied()
    }

    /// Preprocessed, unstemmed token documents.
    pub fn documents(&self) -> &[TokenDocument] {
        &self.documents
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degenerate(&self) -> &Degenerate {
        &self.degenerate
    }

    pub fn vectors(&self, technique: Technique) -> &[ProfileVector] {
        &self.vectors[&technique]
    }

    /// Cosine similarity between profiles `i` and `j`.
    pub fn similarity(&self, technique: Technique, i: usize, j: usize) -> f64 {
        let v = self.vectors(technique);
        simcluster::cosine_similarity(&v[i], &v[j])
    }

    pub fn similarity_matrix(&self, technique: Technique) -> Result<SimilarityMatrix, IndexError> {
        simcluster::similarity_matrix(self.vectors(technique), technique)
            .map_err(|source| IndexError::Cluster { technique, source })
    }

    /// Runs affinity propagation for `technique` and keeps the assignment for
    /// cluster annotations.
    pub fn cluster(&mut self, technique: Technique, config: &AffinityConfig) -> Result<&ClusterAssignment, IndexError> {
        let assignment = if self.len() == 1 {
            ClusterAssignment::from_labels(vec![0])
        } else {
            let sim = self.similarity_matrix(technique)?;
            simcluster::affinity_propagation(&sim, config)
                .map_err(|source| IndexError::Cluster { technique, source })?
        };
        Ok(self.set_clusters(technique, assignment))
    }

    pub fn set_clusters(&mut self, technique: Technique, assignment: ClusterAssignment) -> &ClusterAssignment {
        assert_eq!(assignment.len(), self.len(), "assignment must cover the corpus");
        self.clusters.insert(technique, assignment);
        &self.clusters[&technique]
    }

    pub fn clusters(&self, technique: Technique) -> Option<&ClusterAssignment> {
        self.clusters.get(&technique)
    }

    /// Dense cluster id of profile `index` under `technique`, if clustered.
    pub fn cluster_of(&self, technique: Technique, index: usize) -> Option<usize> {
        self.clusters.get(&technique).map(|a| a.dense_labels()[index])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::sample_profile;
    use crate::vectorize::HashedProjectionProvider;

    #[test]
    fn builds_all_three_representations() {
        let profiles = vec![
            sample_profile("a", "Cybersecurity", "C, C++, Python"),
            sample_profile("b", "Web Development", "HTML, CSS, ReactJS"),
            sample_profile("c", "Cybersecurity", "Python, Networking"),
        ];
        let provider = HashedProjectionProvider::new(32, 1);
        let index = CorpusIndex::build(profiles, &StopWords::english(), &provider, 0.5).unwrap();
        assert_eq!(index.len(), 3);
        for t in Technique::ALL {
            assert_eq!(index.vectors(t).len(), 3);
            assert_eq!(index.similarity(t, 1, 1), 1.0);
        }
        // "networking" was stemmed for TF-IDF.
        assert!(index.vocabulary().index_of("network").is_some());
        assert!(index.vocabulary().index_of("networking").is_none());
        assert_eq!(index.position(&"c".into()), Some(2));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let profiles = vec![sample_profile("a", "AI", "Python"), sample_profile("a", "AI", "Java")];
        let err = CorpusIndex::build(profiles, &StopWords::english(), &HashedProjectionProvider::new(8, 1), 0.5);
        assert!(matches!(err, Err(IndexError::DuplicateId(_))));
    }

    #[test]
    fn universal_tokens_flagged_as_degenerate() {
        let profiles = vec![sample_profile("a", "AI", "Python"), sample_profile("b", "AI", "Python, Java")];
        let index =
            CorpusIndex::build(profiles, &StopWords::english(), &HashedProjectionProvider::new(8, 1), 0.5).unwrap();
        assert_eq!(index.degenerate().zero_tfidf, vec![ProfileId::new("a")]);
    }
}
