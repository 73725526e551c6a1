//! Top-k recommendations for a target profile with categorical filters.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{Profile, ProfileId};
use crate::index::CorpusIndex;
use crate::vectorize::Technique;

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecommendError {
    #[error("unknown target profile `{0}`")]
    UnknownTarget(ProfileId),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("no candidates remain for `{0}` after filtering")]
    NoCandidates(ProfileId),
}

/// Hard constraints applied before ranking. String matches ignore case and
/// surrounding whitespace.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Filters {
    /// Candidate's profession must equal this value.
    pub profession: Option<String>,
    /// Candidate's interest must equal this value.
    pub interest: Option<String>,
    /// Candidate's profession must equal the target's `collaboration_with`.
    pub collaboration: bool,
    /// Ignore every other field and let all candidates through.
    pub disabled: bool,
}

impl Filters {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn admits(&self, target: &Profile, candidate: &Profile) -> bool {
        if self.disabled {
            return true;
        }
        if let Some(p) = &self.profession {
            if !same_value(p, &candidate.profession) {
                return false;
            }
        }
        if let Some(i) = &self.interest {
            if !same_value(i, &candidate.interest) {
                return false;
            }
        }
        !self.collaboration || same_value(&target.collaboration_with, &candidate.profession)
    }
}

fn same_value(a: &str, b: &str) -> bool {
    a.trim().to_lowercase() == b.trim().to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationQuery {
    pub target: ProfileId,
    pub technique: Technique,
    pub k: usize,
    #[serde(default)]
    pub filters: Filters,
}

impl RecommendationQuery {
    pub fn new(target: impl Into<ProfileId>, technique: Technique) -> Self {
        Self { target: target.into(), technique, k: DEFAULT_K, filters: Filters::none() }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_filters(mut self, filters: Filters) -> Self {
        self.filters = filters;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub candidate_id: ProfileId,
    pub similarity: f64,
    /// Dense cluster id under the query's technique, when clustered.
    pub cluster: Option<usize>,
    /// 1-based.
    pub rank: usize,
}

/// Orders by similarity descending, then by profile id ascending.
pub fn rank_order(index: &CorpusIndex) -> impl Fn(&(usize, f64), &(usize, f64)) -> Ordering + '_ {
    move |a, b| {
        b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| index.profile(a.0).id.cmp(&index.profile(b.0).id))
    }
}

/// Every profile other than `target`, ranked by similarity to it. No filters.
pub fn rank_all(index: &CorpusIndex, technique: Technique, target: usize) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> =
        (0..index.len()).filter(|&j| j != target).map(|j| (j, index.similarity(technique, target, j))).collect();
    scored.sort_by(rank_order(index));
    scored
}

pub fn recommend(index: &CorpusIndex, query: &RecommendationQuery) -> Result<Vec<Recommendation>, RecommendError> {
    recommend_excluding(index, query, &HashSet::new())
}

/// As [`recommend`], additionally dropping every candidate in `exclude`.
pub fn recommend_excluding(
    index: &CorpusIndex,
    query: &RecommendationQuery,
    exclude: &HashSet<ProfileId>,
) -> Result<Vec<Recommendation>, RecommendError> {
    if query.k == 0 {
        return Err(RecommendError::ZeroK);
    }
    let target = index.position(&query.target).ok_or_else(|| RecommendError::UnknownTarget(query.target.clone()))?;
    let target_profile = index.profile(target);
    let mut scored: Vec<(usize, f64)> = (0..index.len())
        .filter(|&j| j != target)
        .filter(|&j| {
            let c = index.profile(j);
            !exclude.contains(&c.id) && query.filters.admits(target_profile, c)
        })
        .map(|j| (j, index.similarity(query.technique, target, j)))
        .collect();
    if scored.is_empty() {
        return Err(RecommendError::NoCandidates(query.target.clone()));
    }
    scored.sort_by(rank_order(index));
    scored.truncate(query.k);
    let dense = index.clusters(query.technique).map(|a| a.dense_labels());
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(r, (j, similarity))| Recommendation {
            candidate_id: index.profile(j).id.clone(),
            similarity,
            cluster: dense.as_ref().map(|d| d[j]),
            rank: r + 1,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic, sample_profile, SkillPool, StopWords};
    use crate::simcluster::AffinityConfig;
    use crate::vectorize::HashedProjectionProvider;

    fn small_index() -> CorpusIndex {
        let mut profiles = vec![
            sample_profile("a", "Cybersecurity", "C, Python, Networking"),
            sample_profile("b", "Web Development", "HTML, CSS"),
            sample_profile("c", "Cybersecurity", "C, Python, Networking"),
            sample_profile("d", "Data Mining", "Python, SQL"),
        ];
        profiles[1].profession = "faculty".into();
        profiles[3].profession = "Faculty".into();
        CorpusIndex::build(profiles, &StopWords::english(), &HashedProjectionProvider::new(64, 3), 0.5).unwrap()
    }

    #[test]
    fn identical_text_ranks_first_with_unit_similarity() {
        let index = small_index();
        for t in Technique::ALL {
            let recs = recommend(&index, &RecommendationQuery::new("a", t)).unwrap();
            assert_eq!(recs[0].candidate_id.as_str(), "c");
            assert!((recs[0].similarity - 1.0).abs() < 1e-12);
            assert_eq!(recs[0].rank, 1);
            assert!(recs.iter().all(|r| r.candidate_id.as_str() != "a"));
            assert_eq!(recs.len(), 3);
        }
    }

    #[test]
    fn collaboration_filter_matches_target_preference() {
        let index = small_index();
        let mut q = RecommendationQuery::new("a", Technique::Hybrid);
        q.filters.collaboration = true;
        // sample profiles want to collaborate with faculty.
        let recs = recommend(&index, &q).unwrap();
        let ids: Vec<_> = recs.iter().map(|r| r.candidate_id.as_str()).collect();
        assert_eq!(ids.len(), 2);
        assert!(ids.contains(&"b") && ids.contains(&"d"));
        q.filters.disabled = true;
        assert_eq!(recommend(&index, &q).unwrap().len(), 3);
    }

    #[test]
    fn errors_are_distinguished() {
        let index = small_index();
        let q = RecommendationQuery::new("zz", Technique::Tfidf);
        assert_eq!(recommend(&index, &q), Err(RecommendError::UnknownTarget("zz".into())));
        let mut q = RecommendationQuery::new("a", Technique::Tfidf);
        q.filters.interest = Some("nothing".into());
        assert_eq!(recommend(&index, &q), Err(RecommendError::NoCandidates("a".into())));
        assert_eq!(recommend(&index, &q.clone().with_k(0)), Err(RecommendError::ZeroK));
    }

    #[test]
    fn exclusion_set_removes_candidates() {
        let index = small_index();
        let exclude: HashSet<ProfileId> = ["c".into(), "d".into()].into_iter().collect();
        let recs = recommend_excluding(&index, &RecommendationQuery::new("a", Technique::Embedding), &exclude).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].candidate_id.as_str(), "b");
    }

    #[test]
    fn full_k_lists_every_candidate_once_in_order() {
        let profiles = generate_synthetic(&SkillPool::builtin(), 40, 9).unwrap();
        let mut index =
            CorpusIndex::build(profiles, &StopWords::english(), &HashedProjectionProvider::new(64, 9), 0.5).unwrap();
        index.cluster(Technique::Hybrid, &AffinityConfig::default()).unwrap();
        let target = index.profile(5).id.clone();
        let recs = recommend(&index, &RecommendationQuery::new(target.clone(), Technique::Hybrid).with_k(100)).unwrap();
        assert_eq!(recs.len(), 39);
        let unique: HashSet<_> = recs.iter().map(|r| &r.candidate_id).collect();
        assert_eq!(unique.len(), 39);
        for w in recs.windows(2) {
            assert!(w[0].similarity >= w[1].similarity);
            assert_eq!(w[0].rank + 1, w[1].rank);
        }
        assert!(recs.iter().all(|r| r.cluster.is_some()));
        for r in &recs {
            let j = index.position(&r.candidate_id).unwrap();
            let mean = 0.5 * (index.similarity(Technique::Tfidf, 5, j) + index.similarity(Technique::Embedding, 5, j));
            assert!((r.similarity - mean).abs() < 1e-9);
        }
    }
}
