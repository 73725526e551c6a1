//! Ranking and clustering quality metrics.
//!
//! Ranking metrics are judged against [`RelevanceOracle`], a token-overlap
//! grader that does not depend on any of the representations being compared.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{preprocess, Profile, ProfileId, StopWords};
use crate::simcluster::{ClusterAssignment, SimilarityMatrix};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricError {
    #[error("ranking for query {0} is empty")]
    EmptyRanking(usize),
    #[error("no rankings given")]
    NoQueries,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("every query has zero relevant candidates; mAP is undefined")]
    NoRelevantQueries,
    #[error("every cluster is a singleton")]
    AllSingletons,
    #[error("need at least two clusters, got {0}")]
    TooFewClusters(usize),
    #[error("assignment covers {labels} points, data has {points}")]
    SizeMismatch { points: usize, labels: usize },
    #[error("clusters {0} and {1} have coincident centroids")]
    CoincidentCentroids(usize, usize),
    #[error("relevance thresholds must satisfy 0 <= t1 <= t2 <= t3")]
    BadThresholds,
}

/// Graded relevance of a candidate for a query, 0..=3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevanceJudgment {
    pub query_id: ProfileId,
    pub candidate_id: ProfileId,
    pub grade: u8,
    pub binary_relevant: bool,
}

/// Jaccard cut-offs for grades 3, 2 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceThresholds {
    pub t3: f64,
    pub t2: f64,
    pub t1: f64,
}

impl Default for RelevanceThresholds {
    fn default() -> Self {
        Self { t3: 0.6, t2: 0.4, t1: 0.2 }
    }
}

impl RelevanceThresholds {
    pub fn new(t3: f64, t2: f64, t1: f64) -> Result<Self, MetricError> {
        if !(0.0 <= t1 && t1 <= t2 && t2 <= t3) {
            return Err(MetricError::BadThresholds);
        }
        Ok(Self { t3, t2, t1 })
    }

    pub fn grade(&self, jaccard: f64) -> u8 {
        if jaccard >= self.t3 {
            3
        } else if jaccard >= self.t2 {
            2
        } else if jaccard >= self.t1 {
            1
        } else {
            0
        }
    }
}

/// Jaccard index of two sets; 0.0 when both are empty.
pub fn jaccard<T: Eq + std::hash::Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Grades candidates by the Jaccard overlap of the preprocessed (unstemmed)
/// domain and skillset token sets.
#[derive(Debug, Clone)]
pub struct RelevanceOracle {
    stopwords: StopWords,
    thresholds: RelevanceThresholds,
}

impl RelevanceOracle {
    pub fn new(stopwords: StopWords, thresholds: RelevanceThresholds) -> Self {
        Self { stopwords, thresholds }
    }

    pub fn token_set(&self, profile: &Profile) -> HashSet<String> {
        preprocess(profile, &self.stopwords).tokens.into_iter().collect()
    }

    pub fn judge(&self, query: &Profile, candidate: &Profile) -> RelevanceJudgment {
        self.judge_sets(&query.id, &self.token_set(query), &candidate.id, &self.token_set(candidate))
    }

    /// Same as [`judge`](Self::judge) on precomputed token sets.
    pub fn judge_sets(
        &self,
        query_id: &ProfileId,
        query: &HashSet<String>,
        candidate_id: &ProfileId,
        candidate: &HashSet<String>,
    ) -> RelevanceJudgment {
        let grade = self.thresholds.grade(jaccard(query, candidate));
        RelevanceJudgment {
            query_id: query_id.clone(),
            candidate_id: candidate_id.clone(),
            grade,
            binary_relevant: grade >= 1,
        }
    }
}

/// DCG of `grades` truncated at `depth`, with gain `2^rel - 1` and discount
/// `log2(k + 1)` for 1-based rank `k`.
pub fn dcg(grades: &[u8], depth: usize) -> f64 {
    grades.iter().take(depth).enumerate().map(|(i, &g)| ((1u64 << g) - 1) as f64 / ((i + 2) as f64).log2()).sum()
}

/// NDCG of one ranked grade list; 0.0 when every grade is zero.
pub fn ndcg_single(grades: &[u8], depth: usize) -> f64 {
    let mut ideal = grades.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(&ideal, depth);
    if idcg == 0.0 {
        0.0
    } else {
        dcg(grades, depth) / idcg
    }
}

/// Mean NDCG@depth over queries. Each inner list holds the grades of that
/// query's ranked candidates; the ideal ordering is the same grades sorted
/// in descending order. Queries with no relevant candidate score 0 and still
/// count towards the mean.
pub fn ndcg(rankings: &[Vec<u8>], depth: usize) -> Result<f64, MetricError> {
    if depth == 0 {
        return Err(MetricError::ZeroDepth);
    }
    if rankings.is_empty() {
        return Err(MetricError::NoQueries);
    }
    let mut total = 0.0;
    for (q, grades) in rankings.iter().enumerate() {
        if grades.is_empty() {
            return Err(MetricError::EmptyRanking(q));
        }
        total += ndcg_single(grades, depth);
    }
    Ok(total / rankings.len() as f64)
}

/// Average precision of one ranked binary relevance list, or `None` when it
/// holds no relevant item.
pub fn average_precision(relevant: &[bool]) -> Option<f64> {
    let m = relevant.iter().filter(|r| **r).count();
    if m == 0 {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &r) in relevant.iter().enumerate() {
        if r {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Some(sum / m as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapResult {
    pub map: f64,
    /// Queries without relevant candidates, left out of the mean.
    pub excluded_queries: Vec<usize>,
}

/// Mean average precision over queries. Each list must rank the query's full
/// candidate set, so that its relevant count is the query's `m_q`.
pub fn mean_average_precision(rankings: &[Vec<bool>]) -> Result<MapResult, MetricError> {
    if rankings.is_empty() {
        return Err(MetricError::NoQueries);
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    let mut excluded_queries = Vec::new();
    for (q, ranking) in rankings.iter().enumerate() {
        match average_precision(ranking) {
            Some(ap) => {
                total += ap;
                counted += 1;
            }
            None => excluded_queries.push(q),
        }
    }
    if counted == 0 {
        return Err(MetricError::NoRelevantQueries);
    }
    Ok(MapResult { map: total / counted as f64, excluded_queries })
}

fn check_size(points: usize, assignment: &ClusterAssignment) -> Result<(), MetricError> {
    if assignment.len() != points {
        return Err(MetricError::SizeMismatch { points, labels: assignment.len() });
    }
    Ok(())
}

/// Macro average over clusters with two or more members of the mean pairwise
/// similarity within the cluster.
pub fn intra_cluster_similarity(sim: &SimilarityMatrix, assignment: &ClusterAssignment) -> Result<f64, MetricError> {
    check_size(sim.n(), assignment)?;
    let mut per_cluster = Vec::new();
    for members in assignment.members() {
        if members.len() < 2 {
            continue;
        }
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for (x, &i) in members.iter().enumerate() {
            for &k in &members[x + 1..] {
                sum += sim.get(i, k);
                pairs += 1;
            }
        }
        per_cluster.push(sum / pairs as f64);
    }
    if per_cluster.is_empty() {
        return Err(MetricError::AllSingletons);
    }
    Ok(per_cluster.iter().sum::<f64>() / per_cluster.len() as f64)
}

/// Mean silhouette with cosine distance `1 - similarity`. Points in singleton
/// clusters score 0.
pub fn silhouette(sim: &SimilarityMatrix, assignment: &ClusterAssignment) -> Result<f64, MetricError> {
    let n = sim.n();
    check_size(n, assignment)?;
    let clusters = assignment.members();
    if clusters.len() < 2 {
        return Err(MetricError::TooFewClusters(clusters.len()));
    }
    let dense = assignment.dense_labels();
    let mut total = 0.0;
    for (i, &own) in dense.iter().enumerate() {
        if clusters[own].len() == 1 {
            continue;
        }
        let mean_dist = |members: &[usize]| {
            let (sum, count) = members
                .iter()
                .filter(|&&j| j != i)
                .fold((0.0, 0usize), |(s, c), &j| (s + (1.0 - sim.get(i, j)), c + 1));
            sum / count as f64
        };
        let a = mean_dist(&clusters[own]);
        let b = clusters
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != own)
            .map(|(_, m)| mean_dist(m))
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Davies-Bouldin index on L2-normalized copies of `vectors` (zero vectors
/// stay zero), with Euclidean distances.
pub fn davies_bouldin(vectors: &[Vec<f64>], assignment: &ClusterAssignment) -> Result<f64, MetricError> {
    let normalized: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter().map(|x| x / norm).collect()
            } else {
                v.clone()
            }
        })
        .collect();
    davies_bouldin_raw(&normalized, assignment)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Davies-Bouldin index on the points as given: scatter is the mean distance
/// of members to their centroid, and the index is the mean over clusters of
/// the worst `(S_i + S_j) / d(c_i, c_j)`.
pub fn davies_bouldin_raw(points: &[Vec<f64>], assignment: &ClusterAssignment) -> Result<f64, MetricError> {
    check_size(points.len(), assignment)?;
    let clusters = assignment.members();
    if clusters.len() < 2 {
        return Err(MetricError::TooFewClusters(clusters.len()));
    }
    let dim = points.first().map_or(0, Vec::len);
    let centroids: Vec<Vec<f64>> = clusters
        .iter()
        .map(|m| {
            let mut c = vec![0.0; dim];
            for &i in m {
                for (acc, x) in c.iter_mut().zip(&points[i]) {
                    *acc += x;
                }
            }
            c.iter_mut().for_each(|x| *x /= m.len() as f64);
            c
        })
        .collect();
    let scatter: Vec<f64> = clusters
        .iter()
        .zip(&centroids)
        .map(|(m, c)| m.iter().map(|&i| euclidean(&points[i], c)).sum::<f64>() / m.len() as f64)
        .collect();
    let k = clusters.len();
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = f64::NEG_INFINITY;
        for j in 0..k {
            if i == j {
                continue;
            }
            let d = euclidean(&centroids[i], &centroids[j]);
            if d == 0.0 {
                return Err(MetricError::CoincidentCentroids(i.min(j), i.max(j)));
            }
            worst = worst.max((scatter[i] + scatter[j]) / d);
        }
        total += worst;
    }
    Ok(total / k as f64)
}
