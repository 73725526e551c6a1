//! The full evaluation protocol: for each technique, similarity matrix,
//! affinity propagation, relabelling, the five metrics, and top-k
//! recommendations for designated targets. Artifacts are written in a fixed
//! layout and contain no timestamps, so equal inputs give equal bytes.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{Profile, ProfileId};
use crate::evalmetrics::{self, MetricError, RelevanceOracle, RelevanceThresholds};
use crate::index::{CorpusIndex, IndexError};
use crate::recommender::{self, RecommendError, Recommendation, RecommendationQuery};
use crate::simcluster::{self, AffinityConfig, ClusterAssignment, Projection, SimclusterError, SimilarityMatrix};
use crate::vectorize::Technique;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("no methods requested")]
    NoMethods,
    #[error("the corpus needs at least two profiles, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("{technique}: {source}")]
    Metric { technique: Technique, source: MetricError },
    #[error("{technique}: {source}")]
    Cluster { technique: Technique, source: SimclusterError },
    #[error("{technique}: {source}")]
    Recommend { technique: Technique, source: RecommendError },
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub methods: Vec<Technique>,
    pub affinity: AffinityConfig,
    pub ndcg_depth: usize,
    pub top_k: usize,
    /// Profiles whose top-k lists are exported. Empty means the first profile.
    pub targets: Vec<ProfileId>,
    pub thresholds: RelevanceThresholds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            methods: Technique::ALL.to_vec(),
            affinity: AffinityConfig::default(),
            ndcg_depth: 5,
            top_k: recommender::DEFAULT_K,
            targets: Vec::new(),
            thresholds: RelevanceThresholds::default(),
        }
    }
}

/// Metric rows in report order.
pub const METRIC_ROWS: [&str; 5] = ["Davies-Bouldin", "Silhouette", "Intra-Cluster", "NDCG", "mAP"];

/// `None` marks a metric that is undefined for the clustering obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub davies_bouldin: Option<f64>,
    pub silhouette: Option<f64>,
    pub intra_cluster: Option<f64>,
    pub ndcg: f64,
    pub map: f64,
}

impl MethodMetrics {
    pub fn row(&self, name: &str) -> Option<f64> {
        match name {
            "Davies-Bouldin" => self.davies_bouldin,
            "Silhouette" => self.silhouette,
            "Intra-Cluster" => self.intra_cluster,
            "NDCG" => Some(self.ndcg),
            "mAP" => Some(self.map),
            _ => None,
        }
    }
}

/// A query's full candidate ranking with oracle grades.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRanking {
    pub query: ProfileId,
    pub candidates: Vec<ProfileId>,
    pub similarities: Vec<f64>,
    pub grades: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct MethodResult {
    pub technique: Technique,
    pub similarity: SimilarityMatrix,
    pub assignment: ClusterAssignment,
    pub projection: Projection,
    pub metrics: MethodMetrics,
    /// Queries left out of mAP for having no relevant candidate.
    pub map_excluded: Vec<ProfileId>,
    pub rankings: Vec<QueryRanking>,
    pub recommendations: BTreeMap<ProfileId, Vec<Recommendation>>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub profile_ids: Vec<ProfileId>,
    /// Queries whose candidates all have grade 0 (scored 0 in NDCG).
    pub zero_relevance_queries: Vec<ProfileId>,
    pub methods: Vec<MethodResult>,
}

/// Pairwise oracle grades, `grades[q][c]`. The diagonal is unused.
pub fn grade_matrix(profiles: &[Profile], oracle: &RelevanceOracle) -> Vec<Vec<u8>> {
    let sets: Vec<HashSet<String>> = profiles.iter().map(|p| oracle.token_set(p)).collect();
    let n = profiles.len();
    let mut grades = vec![vec![0u8; n]; n];
    for q in 0..n {
        for c in (q + 1)..n {
            let g = oracle.judge_sets(&profiles[q].id, &sets[q], &profiles[c].id, &sets[c]).grade;
            grades[q][c] = g;
            grades[c][q] = g;
        }
    }
    grades
}

/// Runs the protocol for every configured method. Cluster assignments are
/// stored back into `index` so later recommendations carry cluster ids.
pub fn run_experiment(
    index: &mut CorpusIndex,
    oracle: &RelevanceOracle,
    config: &ExperimentConfig,
) -> Result<ExperimentResult, ExperimentError> {
    if config.methods.is_empty() {
        return Err(ExperimentError::NoMethods);
    }
    let n = index.len();
    if n < 2 {
        return Err(ExperimentError::TooSmall(n));
    }
    let profile_ids: Vec<ProfileId> = index.profiles().iter().map(|p| p.id.clone()).collect();
    let grades = grade_matrix(index.profiles(), oracle);
    let zero_relevance_queries =
        (0..n).filter(|&q| (0..n).all(|c| c == q || grades[q][c] == 0)).map(|q| profile_ids[q].clone()).collect();
    let targets = if config.targets.is_empty() { vec![profile_ids[0].clone()] } else { config.targets.clone() };

    let mut methods = Vec::with_capacity(config.methods.len());
    for &technique in &config.methods {
        let _span = tracing::info_span!("method", technique = technique.as_str()).entered();
        let similarity = index.similarity_matrix(technique)?;
        let assignment = simcluster::affinity_propagation(&similarity, &config.affinity)
            .map_err(|source| ExperimentError::Cluster { technique, source })?;
        tracing::info!(clusters = assignment.n_clusters, converged = assignment.converged, "clustered");
        index.set_clusters(technique, assignment.clone());

        let dense: Vec<Vec<f64>> = index.vectors(technique).iter().map(|v| v.to_dense()).collect();
        let projection =
            simcluster::project_2d(&dense).map_err(|source| ExperimentError::Cluster { technique, source })?;

        let rankings: Vec<QueryRanking> = (0..n)
            .map(|q| {
                let ranked = recommender::rank_all(index, technique, q);
                QueryRanking {
                    query: profile_ids[q].clone(),
                    candidates: ranked.iter().map(|&(c, _)| profile_ids[c].clone()).collect(),
                    similarities: ranked.iter().map(|&(_, s)| s).collect(),
                    grades: ranked.iter().map(|&(c, _)| grades[q][c]).collect(),
                }
            })
            .collect();
        let graded: Vec<Vec<u8>> = rankings.iter().map(|r| r.grades.clone()).collect();
        let binary: Vec<Vec<bool>> = graded.iter().map(|g| g.iter().map(|&x| x >= 1).collect()).collect();
        let metric = |source| ExperimentError::Metric { technique, source };
        let ndcg = evalmetrics::ndcg(&graded, config.ndcg_depth).map_err(metric)?;
        let map = evalmetrics::mean_average_precision(&binary).map_err(metric)?;

        let metrics = MethodMetrics {
            davies_bouldin: optional(evalmetrics::davies_bouldin(&dense, &assignment)).map_err(metric)?,
            silhouette: optional(evalmetrics::silhouette(&similarity, &assignment)).map_err(metric)?,
            intra_cluster: optional(evalmetrics::intra_cluster_similarity(&similarity, &assignment)).map_err(metric)?,
            ndcg,
            map: map.map,
        };

        let mut recommendations = BTreeMap::new();
        for target in &targets {
            let query = RecommendationQuery::new(target.clone(), technique).with_k(config.top_k);
            let recs = recommender::recommend(index, &query)
                .map_err(|source| ExperimentError::Recommend { technique, source })?;
            recommendations.insert(target.clone(), recs);
        }

        methods.push(MethodResult {
            technique,
            similarity,
            assignment,
            projection,
            metrics,
            map_excluded: map.excluded_queries.iter().map(|&q| profile_ids[q].clone()).collect(),
            rankings,
            recommendations,
        });
    }
    Ok(ExperimentResult { config: config.clone(), profile_ids, zero_relevance_queries, methods })
}

/// Maps metrics that are undefined for the clustering to `None`.
fn optional(r: Result<f64, MetricError>) -> Result<Option<f64>, MetricError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(MetricError::TooFewClusters(_) | MetricError::AllSingletons | MetricError::CoincidentCentroids(..)) => {
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub metric: String,
    pub values: BTreeMap<String, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodNotes {
    pub clusters: usize,
    pub converged: bool,
    pub iterations: usize,
    pub map_excluded_queries: Vec<ProfileId>,
}

/// Table-shaped metrics report: one row per metric, one column per method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub methods: Vec<Technique>,
    pub ndcg_depth: usize,
    pub queries: usize,
    pub rows: Vec<ReportRow>,
    pub notes: BTreeMap<String, MethodNotes>,
    pub zero_relevance_queries: Vec<ProfileId>,
}

impl ExperimentResult {
    pub fn method(&self, technique: Technique) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.technique == technique)
    }

    pub fn report(&self) -> Report {
        let rows = METRIC_ROWS
            .iter()
            .map(|&name| ReportRow {
                metric: name.to_string(),
                values: self.methods.iter().map(|m| (m.technique.as_str().to_string(), m.metrics.row(name))).collect(),
            })
            .collect();
        let notes = self
            .methods
            .iter()
            .map(|m| {
                (
                    m.technique.as_str().to_string(),
                    MethodNotes {
                        clusters: m.assignment.n_clusters,
                        converged: m.assignment.converged,
                        iterations: m.assignment.iterations_run,
                        map_excluded_queries: m.map_excluded.clone(),
                    },
                )
            })
            .collect();
        Report {
            methods: self.methods.iter().map(|m| m.technique).collect(),
            ndcg_depth: self.config.ndcg_depth,
            queries: self.profile_ids.len(),
            rows,
            notes,
            zero_relevance_queries: self.zero_relevance_queries.clone(),
        }
    }
}

impl Report {
    /// Aligned text table. Undefined metrics print as `n/a`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<16}", "Metric"));
        for m in &self.methods {
            out.push_str(&format!("{:>12}", m.as_str()));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<16}", row.metric));
            for m in &self.methods {
                match row.values.get(m.as_str()).copied().flatten() {
                    Some(v) => out.push_str(&format!("{v:>12.4}")),
                    None => out.push_str(&format!("{:>12}", "n/a")),
                }
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "\nNDCG@{} over {} queries ({} with no relevant candidate, scored 0).\n",
            self.ndcg_depth,
            self.queries,
            self.zero_relevance_queries.len()
        ));
        for m in &self.methods {
            if let Some(n) = self.notes.get(m.as_str()) {
                out.push_str(&format!(
                    "{}: {} clusters, converged={} after {} iterations, {} queries excluded from mAP\n",
                    m.as_str(),
                    n.clusters,
                    n.converged,
                    n.iterations,
                    n.map_excluded_queries.len()
                ));
            }
        }
        out
    }
}

#[derive(Serialize)]
struct ClustersFile<'a> {
    technique: Technique,
    labels: &'a [usize],
    dense_labels: Vec<usize>,
    exemplars: Vec<&'a ProfileId>,
    n_clusters: usize,
    converged: bool,
    iterations: usize,
}

#[derive(Serialize)]
struct RecommendationRow<'a> {
    rank: usize,
    candidate_id: &'a ProfileId,
    name: &'a str,
    summary: String,
    similarity: f64,
    cluster: Option<usize>,
}

fn write_file(path: PathBuf, bytes: &[u8]) -> Result<PathBuf, ExperimentError> {
    let mut f = fs::File::create(&path).map_err(|source| ExperimentError::Io { path: path.clone(), source })?;
    f.write_all(bytes).map_err(|source| ExperimentError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, ExperimentError> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

/// Writes every artifact into `dir` (created if missing) and returns the
/// paths in write order:
///
/// - `report.json`, `report.txt`
/// - per method: `sim_<m>.json`, `clusters_<m>.json`, `coords_<m>.csv`,
///   `rankings_<m>.json`, `recommendations_<m>.json`
pub fn write_artifacts(
    result: &ExperimentResult,
    index: &CorpusIndex,
    dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.to_path_buf(), source })?;
    let report = result.report();
    let mut written = vec![
        write_file(dir.join("report.json"), &json_bytes(&report)?)?,
        write_file(dir.join("report.txt"), report.to_text().as_bytes())?,
    ];
    for m in &result.methods {
        let name = m.technique.as_str();
        written.push(write_file(dir.join(format!("sim_{name}.json")), &json_bytes(&m.similarity)?)?);

        let clusters = ClustersFile {
            technique: m.technique,
            labels: &m.assignment.labels,
            dense_labels: m.assignment.dense_labels(),
            exemplars: m.assignment.exemplars.iter().map(|&e| &result.profile_ids[e]).collect(),
            n_clusters: m.assignment.n_clusters,
            converged: m.assignment.converged,
            iterations: m.assignment.iterations_run,
        };
        written.push(write_file(dir.join(format!("clusters_{name}.json")), &json_bytes(&clusters)?)?);

        let dense = m.assignment.dense_labels();
        let mut csv = String::from("id,x,y,cluster\n");
        for (i, (x, y)) in m.projection.points.iter().enumerate() {
            csv.push_str(&format!("{},{x},{y},{}\n", result.profile_ids[i], dense[i]));
        }
        written.push(write_file(dir.join(format!("coords_{name}.csv")), csv.as_bytes())?);

        written.push(write_file(dir.join(format!("rankings_{name}.json")), &json_bytes(&m.rankings)?)?);

        let recs: BTreeMap<&ProfileId, Vec<RecommendationRow>> = m
            .recommendations
            .iter()
            .map(|(target, list)| {
                let rows = list
                    .iter()
                    .map(|r| {
                        let p = index.profile(index.position(&r.candidate_id).expect("candidate from index"));
                        RecommendationRow {
                            rank: r.rank,
                            candidate_id: &r.candidate_id,
                            name: &p.name,
                            summary: p.summary(),
                            similarity: r.similarity,
                            cluster: r.cluster,
                        }
                    })
                    .collect();
                (target, rows)
            })
            .collect();
        written.push(write_file(dir.join(format!("recommendations_{name}.json")), &json_bytes(&recs)?)?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic, SkillPool, StopWords};
    use crate::vectorize::HashedProjectionProvider;

    fn run(dir: &Path) -> (Report, Vec<PathBuf>) {
        let profiles = generate_synthetic(&SkillPool::builtin(), 30, 4).unwrap();
        let mut index =
            CorpusIndex::build(profiles, &StopWords::english(), &HashedProjectionProvider::new(32, 4), 0.5).unwrap();
        let oracle = RelevanceOracle::new(StopWords::english(), RelevanceThresholds::default());
        let result = run_experiment(&mut index, &oracle, &ExperimentConfig::default()).unwrap();
        let files = write_artifacts(&result, &index, dir).unwrap();
        (result.report(), files)
    }

    #[test]
    fn report_layout_and_determinism() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let (report, files) = run(a.path());
        run(b.path());
        assert_eq!(report.rows.len(), 5);
        assert_eq!(report.rows.iter().map(|r| r.metric.as_str()).collect::<Vec<_>>(), METRIC_ROWS);
        assert!(report.rows.iter().all(|r| r.values.len() == 3));
        assert_eq!(files.len(), 2 + 5 * 3);
        for f in files {
            let name = f.file_name().unwrap();
            assert_eq!(fs::read(&f).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?}");
        }
        let text = fs::read_to_string(a.path().join("report.txt")).unwrap();
        assert!(text.starts_with("Metric"));
        assert_eq!(text.lines().take(6).count(), 6);
    }

    #[test]
    fn metrics_are_in_range() {
        let dir = tempfile::tempdir().unwrap();
        let (report, _) = run(dir.path());
        for row in &report.rows {
            for v in row.values.values().flatten() {
                assert!(v.is_finite());
                if row.metric != "Davies-Bouldin" {
                    assert!((-1.0..=1.0).contains(v), "{} = {v}", row.metric);
                }
            }
        }
    }

    #[test]
    fn empty_method_list_rejected() {
        let profiles = generate_synthetic(&SkillPool::builtin(), 5, 1).unwrap();
        let mut index =
            CorpusIndex::build(profiles, &StopWords::english(), &HashedProjectionProvider::new(8, 1), 0.5).unwrap();
        let oracle = RelevanceOracle::new(StopWords::english(), RelevanceThresholds::default());
        let config = ExperimentConfig { methods: vec![], ..Default::default() };
        assert!(matches!(run_experiment(&mut index, &oracle, &config), Err(ExperimentError::NoMethods)));
    }
}
