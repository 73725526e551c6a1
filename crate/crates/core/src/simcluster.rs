//! Pairwise cosine similarity, affinity-propagation clustering, cluster-based
//! relabelling and a PCA projection for plotting.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::corpus::{Profile, ProfileId};
use crate::vectorize::{ProfileVector, Technique};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimclusterError {
    #[error("need at least {needed} vectors, got {got}")]
    TooFewVectors { needed: usize, got: usize },
    #[error("vector {index} is {found}, expected {expected} like vector 0")]
    MixedRepresentations { index: usize, expected: &'static str, found: &'static str },
    #[error("damping must lie in [0.5, 1), got {0}")]
    BadDamping(f64),
    #[error("max_iter and convergence_iter must be positive")]
    BadIterations,
    #[error("similarity matrix is empty")]
    EmptyMatrix,
    #[error("similarity matrix values must be finite")]
    NonFinite,
    #[error("{profiles} profiles but {labels} labels")]
    LengthMismatch { profiles: usize, labels: usize },
}

/// Cosine of the angle between `a` and `b`. A zero vector on either side
/// yields 0.0 (logged); mismatched representations also yield 0.0.
pub fn cosine_similarity(a: &ProfileVector, b: &ProfileVector) -> f64 {
    let (na, nb) = (a.norm_sq(), b.norm_sq());
    if na == 0.0 || nb == 0.0 {
        tracing::warn!("cosine similarity with a zero vector; treating as 0.0");
        return 0.0;
    }
    match a.dot(b) {
        Some(dot) => cosine_from_parts(dot, na, nb),
        None => {
            tracing::warn!("cosine similarity between {} and {} vectors", a.kind_name(), b.kind_name());
            0.0
        }
    }
}

/// `dot / sqrt(|a|^2 |b|^2)`, clamped to [-1, 1]. Taking one square root of
/// the product makes the cosine of a vector with itself exactly 1.0.
fn cosine_from_parts(dot: f64, norm_sq_a: f64, norm_sq_b: f64) -> f64 {
    (dot / (norm_sq_a * norm_sq_b).sqrt()).clamp(-1.0, 1.0)
}

/// Symmetric matrix of pairwise similarities, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    technique: Option<Technique>,
}

impl SimilarityMatrix {
    /// Wraps precomputed values. The matrix is not required to be symmetric,
    /// which lets fixtures exercise the clustering directly.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, SimclusterError> {
        let n = rows.len();
        if n == 0 {
            return Err(SimclusterError::EmptyMatrix);
        }
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(SimclusterError::LengthMismatch { profiles: n, labels: row.len() });
            }
            values.extend(row);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SimclusterError::NonFinite);
        }
        Ok(Self { n, values, technique: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn technique(&self) -> Option<Technique> {
        self.technique
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.n + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Median of the off-diagonal entries (the diagonal when n == 1).
    pub fn median_off_diagonal(&self) -> f64 {
        let mut off: Vec<f64> = (0..self.n)
            .flat_map(|i| (0..self.n).filter(move |&k| k != i).map(move |k| (i, k)))
            .map(|(i, k)| self.get(i, k))
            .collect();
        if off.is_empty() {
            return self.get(0, 0);
        }
        off.sort_by(f64::total_cmp);
        let m = off.len();
        if m % 2 == 1 {
            off[m / 2]
        } else {
            (off[m / 2 - 1] + off[m / 2]) / 2.0
        }
    }
}

#[derive(Serialize)]
struct SimilarityMatrixJson<'a> {
    technique: Option<Technique>,
    n: usize,
    values: Vec<&'a [f64]>,
}

impl Serialize for SimilarityMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SimilarityMatrixJson {
            technique: self.technique,
            n: self.n,
            values: (0..self.n).map(|i| self.row(i)).collect(),
        }
        .serialize(serializer)
    }
}

/// Full pairwise cosine matrix over `vectors`, each pair computed once. The
/// diagonal is 1.0 for nonzero vectors.
pub fn similarity_matrix(vectors: &[ProfileVector], technique: Technique) -> Result<SimilarityMatrix, SimclusterError> {
    if vectors.len() < 2 {
        return Err(SimclusterError::TooFewVectors { needed: 2, got: vectors.len() });
    }
    let expected = vectors[0].kind_name();
    let dim = vectors[0].dimension();
    for (index, v) in vectors.iter().enumerate() {
        if v.kind_name() != expected || v.dimension() != dim {
            return Err(SimclusterError::MixedRepresentations { index, expected, found: v.kind_name() });
        }
    }
    let n = vectors.len();
    let norms: Vec<f64> = vectors.iter().map(ProfileVector::norm_sq).collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = if norms[i] > 0.0 { 1.0 } else { 0.0 };
        for k in (i + 1)..n {
            let s = if norms[i] > 0.0 && norms[k] > 0.0 {
                let dot = vectors[i].dot(&vectors[k]).expect("uniform representation checked above");
                cosine_from_parts(dot, norms[i], norms[k])
            } else {
                0.0
            };
            values[i * n + k] = s;
            values[k * n + i] = s;
        }
    }
    let zero = norms.iter().filter(|n| **n == 0.0).count();
    if zero > 0 {
        tracing::warn!(technique = %technique, zero_vectors = zero, "similarity matrix includes zero vectors");
    }
    Ok(SimilarityMatrix { n, values, technique: Some(technique) })
}

/// Self-similarity used for every point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preference {
    /// Median of the off-diagonal similarities.
    Median,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinityConfig {
    pub damping: f64,
    pub max_iter: usize,
    pub convergence_iter: usize,
    pub preference: Preference,
}

impl Default for AffinityConfig {
    fn default() -> Self {
        Self { damping: 0.5, max_iter: 200, convergence_iter: 15, preference: Preference::Median }
    }
}

/// Exemplar-based clustering result. `labels[i]` is the index of the exemplar
/// point `i` belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub exemplars: Vec<usize>,
    pub n_clusters: usize,
    pub iterations_run: usize,
    pub converged: bool,
}

impl ClusterAssignment {
    /// Builds an assignment from per-point labels, with the exemplars taken as
    /// the distinct label values. Useful for fixtures and for metrics on
    /// externally produced clusterings.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let mut exemplars = labels.clone();
        exemplars.sort_unstable();
        exemplars.dedup();
        Self { n_clusters: exemplars.len(), labels, exemplars, iterations_run: 0, converged: true }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Cluster ids renumbered densely 0..k-1 in order of first appearance.
    pub fn dense_labels(&self) -> Vec<usize> {
        dense_renumber(&self.labels)
    }

    /// Member indices per dense cluster id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let dense = self.dense_labels();
        let k = dense.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); k];
        for (i, c) in dense.into_iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// Renumbers arbitrary labels densely in order of first appearance.
pub fn dense_renumber(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(p) => p,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

fn argmax_lowest(values: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((k, v));
        }
    }
    best.map(|b| b.0)
}

const TIE_BREAK: f64 = 1e-12;

/// Affinity propagation on a similarity matrix.
///
/// Responsibilities and availabilities are updated with the standard
/// message-passing rules and damped as `damping * old + (1 - damping) * new`.
/// After every sweep the exemplars are the points with `r(k,k) + a(k,k) > 0`;
/// the run has converged once that set is non-empty and unchanged for
/// `convergence_iter` consecutive sweeps. Points are labelled with the
/// exemplar of highest similarity, ties to the lowest index.
///
/// When every off-diagonal similarity equals the preference or lies above it,
/// the iteration is skipped: a preference at or below the common value gives
/// one cluster (exemplar 0), a larger one makes every point its own exemplar.
/// If the iteration ends with no positive point, the point with the largest
/// `r(k,k) + a(k,k)` becomes the single exemplar.
///
/// The preference of point `k` is lowered by `k * 1e-12 * scale` (scale being
/// the largest absolute similarity, at least 1). Exact duplicates otherwise
/// sit on a symmetric fixed point where no exemplar emerges; the offset hands
/// such ties to the lowest index and is far below any meaningful gap.
pub fn affinity_propagation(
    sim: &SimilarityMatrix,
    config: &AffinityConfig,
) -> Result<ClusterAssignment, SimclusterError> {
    if !(0.5..1.0).contains(&config.damping) {
        return Err(SimclusterError::BadDamping(config.damping));
    }
    if config.max_iter == 0 || config.convergence_iter == 0 {
        return Err(SimclusterError::BadIterations);
    }
    let n = sim.n();
    let preference = match config.preference {
        Preference::Median => sim.median_off_diagonal(),
        Preference::Value(p) => p,
    };
    if !preference.is_finite() {
        return Err(SimclusterError::NonFinite);
    }
    if n == 1 {
        return Ok(ClusterAssignment {
            labels: vec![0],
            exemplars: vec![0],
            n_clusters: 1,
            iterations_run: 0,
            converged: true,
        });
    }

    let first_off = sim.get(0, 1);
    let all_equal = (0..n).all(|i| (0..n).all(|k| i == k || sim.get(i, k) == first_off));
    if all_equal {
        return Ok(if preference <= first_off {
            ClusterAssignment {
                labels: vec![0; n],
                exemplars: vec![0],
                n_clusters: 1,
                iterations_run: 0,
                converged: true,
            }
        } else {
            let all: Vec<usize> = (0..n).collect();
            ClusterAssignment { labels: all.clone(), exemplars: all, n_clusters: n, iterations_run: 0, converged: true }
        });
    }

    let spread = (0..n * n)
        .map(|idx| sim.get(idx / n, idx % n))
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(preference.abs())
        .max(1.0);
    let tie = TIE_BREAK * spread;
    let s = |i: usize, k: usize| if i == k { preference - tie * k as f64 } else { sim.get(i, k) };
    let damping = config.damping;
    let mut r = vec![0.0f64; n * n];
    let mut a = vec![0.0f64; n * n];
    let mut exemplars: Vec<usize> = Vec::new();
    let mut stable = 0usize;
    let mut converged = false;
    let mut iterations_run = 0;

    for it in 0..config.max_iter {
        iterations_run = it + 1;

        // Responsibilities: subtract the best competing a + s in the row.
        for i in 0..n {
            let (mut first, mut first_k, mut second) = (f64::NEG_INFINITY, 0, f64::NEG_INFINITY);
            for k in 0..n {
                let v = a[i * n + k] + s(i, k);
                if v > first {
                    second = first;
                    first = v;
                    first_k = k;
                } else if v > second {
                    second = v;
                }
            }
            for k in 0..n {
                let competitor = if k == first_k { second } else { first };
                let fresh = s(i, k) - competitor;
                let idx = i * n + k;
                r[idx] = damping * r[idx] + (1.0 - damping) * fresh;
            }
        }

        // Availabilities from the column sums of positive responsibilities.
        for k in 0..n {
            let positive: f64 = (0..n).filter(|&i| i != k).map(|i| r[i * n + k].max(0.0)).sum();
            let rkk = r[k * n + k];
            for i in 0..n {
                let fresh = if i == k { positive } else { (rkk + positive - r[i * n + k].max(0.0)).min(0.0) };
                let idx = i * n + k;
                a[idx] = damping * a[idx] + (1.0 - damping) * fresh;
            }
        }

        let current: Vec<usize> = (0..n).filter(|&k| r[k * n + k] + a[k * n + k] > 0.0).collect();
        if current == exemplars {
            stable += 1;
        } else {
            exemplars = current;
            stable = 1;
        }
        if !exemplars.is_empty() && stable >= config.convergence_iter {
            converged = true;
            break;
        }
    }

    if exemplars.is_empty() {
        let best = argmax_lowest((0..n).map(|k| (k, r[k * n + k] + a[k * n + k]))).expect("n >= 2");
        tracing::warn!(exemplar = best, "affinity propagation found no exemplar; using the strongest candidate");
        exemplars.push(best);
    }
    if !converged {
        tracing::warn!(iterations = iterations_run, "affinity propagation did not converge");
    }

    let labels = (0..n)
        .map(|i| {
            if exemplars.binary_search(&i).is_ok() {
                i
            } else {
                let best = argmax_lowest(exemplars.iter().map(|&k| (k, sim.get(i, k)))).expect("non-empty exemplars");
                best
            }
        })
        .collect();
    Ok(ClusterAssignment { n_clusters: exemplars.len(), labels, exemplars, iterations_run, converged })
}

/// A profile annotated with its dense cluster id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledProfile {
    pub profile_id: ProfileId,
    pub cluster: usize,
}

/// Annotates each profile with its cluster, renumbered 0..k-1 by first
/// appearance.
pub fn relabel(profiles: &[Profile], assignment: &ClusterAssignment) -> Result<Vec<LabelledProfile>, SimclusterError> {
    if profiles.len() != assignment.len() {
        return Err(SimclusterError::LengthMismatch { profiles: profiles.len(), labels: assignment.len() });
    }
    Ok(profiles
        .iter()
        .zip(assignment.dense_labels())
        .map(|(p, cluster)| LabelledProfile { profile_id: p.id.clone(), cluster })
        .collect())
}

/// 2D principal-component coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub points: Vec<(f64, f64)>,
    /// Set when the centered data has rank 0 (all points identical).
    pub degenerate: bool,
}

/// Projects `vectors` onto their top two principal components after mean
/// centering. Each component's sign is fixed so that its largest-magnitude
/// loading (lowest index on ties) is positive. A missing component (rank
/// below 2) yields zero coordinates.
pub fn project_2d(vectors: &[Vec<f64>]) -> Result<Projection, SimclusterError> {
    let n = vectors.len();
    if n < 2 {
        return Err(SimclusterError::TooFewVectors { needed: 2, got: n });
    }
    let d = vectors[0].len();
    if let Some(index) = vectors.iter().position(|v| v.len() != d) {
        return Err(SimclusterError::MixedRepresentations { index, expected: "equal width", found: "other width" });
    }
    let mean: Vec<f64> = (0..d).map(|j| vectors.iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
    let x = DMatrix::from_fn(n, d, |i, j| vectors[i][j] - mean[j]);

    // Work in the n x n Gram space, which stays small however wide the
    // vectors are.
    let gram = &x * x.transpose();
    let trace: f64 = gram.trace();
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]).then(p.cmp(&q)));

    let tol = 1e-12 * trace.max(f64::MIN_POSITIVE);
    let mut coords = vec![[0.0f64; 2]; n];
    let mut rank = 0;
    for (c, &e) in order.iter().take(2).enumerate() {
        let lambda = eig.eigenvalues[e];
        if lambda.is_nan() || lambda <= tol {
            continue;
        }
        rank += 1;
        let u = eig.eigenvectors.column(e);
        let loading = x.transpose() * u;
        let pivot = argmax_lowest(loading.iter().enumerate().map(|(j, v)| (j, v.abs()))).unwrap_or(0);
        let sign = if loading[pivot] < 0.0 { -1.0 } else { 1.0 };
        let scale = lambda.sqrt();
        for i in 0..n {
            coords[i][c] = sign * u[i] * scale;
        }
    }
    Ok(Projection { points: coords.into_iter().map(|c| (c[0], c[1])).collect(), degenerate: rank == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorize::{DenseVector, SparseVector};
    use approx::assert_abs_diff_eq;

    fn dense(v: &[f64]) -> ProfileVector {
        ProfileVector::Dense(DenseVector::new(v.to_vec()))
    }

    #[test]
    fn cosine_examples() {
        assert_abs_diff_eq!(cosine_similarity(&dense(&[1.0, 2.0]), &dense(&[1.0, 2.0])), 1.0, epsilon = 1e-15);
        assert_eq!(cosine_similarity(&dense(&[1.0, 0.0]), &dense(&[0.0, 1.0])), 0.0);
        assert_abs_diff_eq!(
            cosine_similarity(&dense(&[1.0, 1.0]), &dense(&[1.0, 0.0])),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
        assert_eq!(cosine_similarity(&dense(&[0.0, 0.0]), &dense(&[1.0, 0.0])), 0.0);
        let sparse = ProfileVector::Sparse(SparseVector::new(vec![(0, 1.0)], 2));
        assert_eq!(cosine_similarity(&sparse, &dense(&[1.0, 0.0])), 0.0);
    }

    #[test]
    fn matrix_examples() {
        let m = similarity_matrix(&[dense(&[1.0, 1.0]), dense(&[1.0, 1.0])], Technique::Embedding).unwrap();
        assert_eq!(m.rows(), vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let onehot: Vec<ProfileVector> =
            (0..3).map(|i| ProfileVector::Sparse(SparseVector::new(vec![(i, 2.0)], 3))).collect();
        let m = similarity_matrix(&onehot, Technique::Tfidf).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(m.get(i, k), if i == k { 1.0 } else { 0.0 });
            }
        }
        assert!(matches!(
            similarity_matrix(&[dense(&[1.0]), onehot[0].clone()], Technique::Tfidf),
            Err(SimclusterError::MixedRepresentations { index: 1, .. })
        ));
        assert!(matches!(
            similarity_matrix(&[dense(&[1.0])], Technique::Tfidf),
            Err(SimclusterError::TooFewVectors { .. })
        ));
    }

    #[test]
    fn median_of_off_diagonal() {
        let m =
            SimilarityMatrix::from_rows(vec![vec![9.0, 1.0, 2.0], vec![1.0, 9.0, 3.0], vec![2.0, 3.0, 9.0]]).unwrap();
        assert_eq!(m.median_off_diagonal(), 2.0);
    }

    #[test]
    fn single_point_is_its_own_exemplar() {
        let m = SimilarityMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let a = affinity_propagation(&m, &AffinityConfig::default()).unwrap();
        assert_eq!((a.labels, a.exemplars, a.n_clusters), (vec![0], vec![0], 1));
    }

    #[test]
    fn duplicate_pairs_form_two_clusters() {
        let m = SimilarityMatrix::from_rows(vec![
            vec![1.0, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        let a = affinity_propagation(&m, &AffinityConfig::default()).unwrap();
        assert_eq!(a.n_clusters, 2, "{a:?}");
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.labels[2], a.labels[3]);
        assert_ne!(a.labels[0], a.labels[2]);
    }

    #[test]
    fn all_equal_similarities_single_cluster() {
        let m =
            SimilarityMatrix::from_rows(vec![vec![1.0, 0.3, 0.3], vec![0.3, 1.0, 0.3], vec![0.3, 0.3, 1.0]]).unwrap();
        let a = affinity_propagation(&m, &AffinityConfig::default()).unwrap();
        assert_eq!(a.exemplars, vec![0]);
        assert_eq!(a.labels, vec![0, 0, 0]);
        let cfg = AffinityConfig { preference: Preference::Value(0.9), ..Default::default() };
        assert_eq!(affinity_propagation(&m, &cfg).unwrap().n_clusters, 3);
    }

    #[test]
    fn bad_parameters_rejected() {
        let m = SimilarityMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cfg = AffinityConfig { damping: 1.0, ..Default::default() };
        assert_eq!(affinity_propagation(&m, &cfg), Err(SimclusterError::BadDamping(1.0)));
        let cfg = AffinityConfig { max_iter: 0, ..Default::default() };
        assert_eq!(affinity_propagation(&m, &cfg), Err(SimclusterError::BadIterations));
    }

    #[test]
    fn relabel_renumbers_densely() {
        let profiles: Vec<Profile> =
            ["a", "b", "c"].iter().map(|id| crate::corpus::sample_profile(id, "d", "s")).collect();
        let assignment = ClusterAssignment::from_labels(vec![5, 5, 9]);
        let labelled = relabel(&profiles, &assignment).unwrap();
        assert_eq!(labelled.iter().map(|l| l.cluster).collect::<Vec<_>>(), vec![0, 0, 1]);
        let single = ClusterAssignment::from_labels(vec![2, 2, 2]);
        assert!(relabel(&profiles, &single).unwrap().iter().all(|l| l.cluster == 0));
        assert!(matches!(
            relabel(&profiles[..2], &single),
            Err(SimclusterError::LengthMismatch { profiles: 2, labels: 3 })
        ));
        assert_eq!(dense_renumber(&[7, 3, 7, 1, 3]), vec![0, 1, 0, 2, 1]);
    }

    #[test]
    fn projection_of_identical_points_is_origin() {
        let p = project_2d(&vec![vec![1.0, 2.0, 3.0]; 4]).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.points, vec![(0.0, 0.0); 4]);
    }

    #[test]
    fn collinear_points_have_flat_second_axis() {
        let dir = [0.3, -1.2, 0.5, 2.0, 0.1];
        let base = [1.0, 1.0, -2.0, 0.0, 4.0];
        let pts: Vec<Vec<f64>> =
            [-2.0, -0.5, 0.0, 1.0, 3.5, 7.0].iter().map(|t| (0..5).map(|j| base[j] + t * dir[j]).collect()).collect();
        let p = project_2d(&pts).unwrap();
        assert_eq!(p.points.len(), pts.len());
        assert!(!p.degenerate);
        for (_, y) in &p.points {
            assert!(y.abs() < 1e-6, "{y}");
        }
        // Largest loading is on coordinate 3 (+2.0), so x grows with t.
        assert!(p.points[5].0 > p.points[0].0);
    }

    #[test]
    fn projection_preserves_pairwise_distances_in_plane() {
        let pts = vec![vec![0.0, 0.0, 0.0], vec![3.0, 0.0, 0.0], vec![0.0, 4.0, 0.0], vec![3.0, 4.0, 0.0]];
        let p = project_2d(&pts).unwrap();
        let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        assert_abs_diff_eq!(dist(p.points[0], p.points[3]), 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dist(p.points[0], p.points[1]), 3.0, epsilon = 1e-9);
    }
}
