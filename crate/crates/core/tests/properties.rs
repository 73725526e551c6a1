use std::collections::HashSet;

use collabrec_core::corpus::{
    generate_synthetic, preprocess, write_profiles_csv, Profile, ProfileId, SkillPool, StopWords,
};
use collabrec_core::evalmetrics::{davies_bouldin_raw, intra_cluster_similarity, ndcg_single, silhouette};
use collabrec_core::index::CorpusIndex;
use collabrec_core::recommender::{recommend, Filters, RecommendationQuery};
use collabrec_core::simcluster::{
    affinity_propagation, similarity_matrix, AffinityConfig, ClusterAssignment, Preference, SimilarityMatrix,
};
use collabrec_core::vectorize::{DenseVector, HashedProjectionProvider, ProfileVector, Technique};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_index(n: usize, seed: u64) -> CorpusIndex {
    let profiles = generate_synthetic(&SkillPool::builtin(), n, seed).unwrap();
    CorpusIndex::build(profiles, &StopWords::english(), &HashedProjectionProvider::new(32, seed), 0.5).unwrap()
}

fn distinct_cosine_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let cos = |a: &[f64], b: &[f64]| {
        let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        d / (a.iter().map(|x| x * x).sum::<f64>().sqrt() * b.iter().map(|x| x * x).sum::<f64>().sqrt())
    };
    pts.iter().map(|a| pts.iter().map(|b| cos(a, b)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn similarity_matrix_is_symmetric_with_unit_diagonal(
        rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 2..12)
    ) {
        let vectors: Vec<ProfileVector> = rows
            .into_iter()
            .map(|mut r| {
                if r.iter().all(|x| *x == 0.0) {
                    r[0] = 1.0;
                }
                ProfileVector::Dense(DenseVector::new(r))
            })
            .collect();
        let m = similarity_matrix(&vectors, Technique::Embedding).unwrap();
        for i in 0..m.n() {
            prop_assert!((m.get(i, i) - 1.0).abs() <= 1e-9);
            for k in 0..m.n() {
                prop_assert!((m.get(i, k) - m.get(k, i)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn every_label_is_an_exemplar_and_exemplars_label_themselves(seed in any::<u64>(), n in 2usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = SimilarityMatrix::from_rows(distinct_cosine_matrix(&mut rng, n)).unwrap();
        let a = affinity_propagation(&m, &AffinityConfig::default()).unwrap();
        prop_assert_eq!(a.labels.len(), n);
        prop_assert_eq!(a.n_clusters, a.exemplars.len());
        for l in &a.labels {
            prop_assert!(a.exemplars.contains(l));
        }
        for e in &a.exemplars {
            prop_assert_eq!(a.labels[*e], *e);
        }
    }

    #[test]
    fn ndcg_is_one_exactly_for_descending_lists(grades in prop::collection::vec(0u8..=3, 1..10)) {
        let v = ndcg_single(&grades, grades.len());
        prop_assert!((0.0..=1.0).contains(&v));
        let descending = grades.windows(2).all(|w| w[0] >= w[1]);
        if grades.iter().any(|g| *g > 0) {
            prop_assert_eq!(v == 1.0, descending);
        } else {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn cluster_metrics_ignore_label_names(seed in any::<u64>(), n in 4usize..25, k in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = SimilarityMatrix::from_rows(distinct_cosine_matrix(&mut rng, n)).unwrap();
        let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
        let renamed: Vec<usize> = labels.iter().map(|l| 1000 - 7 * l).collect();
        let (a, b) = (ClusterAssignment::from_labels(labels), ClusterAssignment::from_labels(renamed));
        prop_assert!((silhouette(&m, &a).unwrap() - silhouette(&m, &b).unwrap()).abs() <= 1e-12);
        prop_assert!((intra_cluster_similarity(&m, &a).unwrap() - intra_cluster_similarity(&m, &b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn davies_bouldin_is_rotation_invariant(seed in any::<u64>(), n in 4usize..30, dim in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|i| (0..dim).map(|d| rng.random_range(-1.0..1.0) + if d == 0 { 4.0 * (i % 2) as f64 } else { 0.0 }).collect()).collect();
        let labels = ClusterAssignment::from_labels((0..n).map(|i| i % 2).collect());
        let q = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        let rotated: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| (&q * nalgebra::DVector::from_column_slice(p)).iter().copied().collect())
            .collect();
        let before = davies_bouldin_raw(&pts, &labels).unwrap();
        let after = davies_bouldin_raw(&rotated, &labels).unwrap();
        prop_assert!((before - after).abs() <= 1e-7, "{} vs {}", before, after);
    }

    #[test]
    fn preprocessed_documents_hold_no_stop_words(seed in 0u64..1000) {
        let stop = StopWords::english();
        for p in generate_synthetic(&SkillPool::builtin(), 10, seed).unwrap() {
            let mut p: Profile = p;
            p.skillset.push_str(", the and of Python");
            for t in preprocess(&p, &stop).tokens {
                prop_assert!(!stop.contains(&t), "{}", t);
            }
        }
    }
}

#[test]
fn raising_preference_never_lowers_the_cluster_count_on_fixtures() {
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = SimilarityMatrix::from_rows(distinct_cosine_matrix(&mut rng, 25)).unwrap();
        let mut last = 0;
        for pref in [-1.0, -0.5, 0.0, m.median_off_diagonal(), 0.5, 0.8] {
            let config = AffinityConfig { preference: Preference::Value(pref), ..AffinityConfig::default() };
            let k = affinity_propagation(&m, &config).unwrap().n_clusters;
            assert!(k >= last, "seed {seed}: preference {pref} gave {k} clusters after {last}");
            last = k;
        }
    }
}

#[test]
fn synthetic_generation_is_byte_identical() {
    let pool = SkillPool::builtin();
    let csv = |seed| {
        let mut out = Vec::new();
        write_profiles_csv(&mut out, &generate_synthetic(&pool, 150, seed).unwrap()).unwrap();
        out
    };
    assert_eq!(csv(3), csv(3));
    assert_ne!(csv(3), csv(4));
}

#[test]
fn recommendations_follow_the_hybrid_identity_and_are_deterministic() {
    let index = small_index(40, 17);
    for target in index.profiles().iter().take(10) {
        let q = RecommendationQuery::new(target.id.clone(), Technique::Hybrid).with_k(index.len());
        let recs = recommend(&index, &q).unwrap();
        assert_eq!(recs.len(), index.len() - 1);
        let ids: HashSet<&ProfileId> = recs.iter().map(|r| &r.candidate_id).collect();
        assert_eq!(ids.len(), recs.len());
        assert!(recs.windows(2).all(|w| w[0].similarity >= w[1].similarity));
        let t = index.position(&target.id).unwrap();
        for r in &recs {
            let c = index.position(&r.candidate_id).unwrap();
            let mean = 0.5 * (index.similarity(Technique::Tfidf, t, c) + index.similarity(Technique::Embedding, t, c));
            assert!((r.similarity - mean).abs() <= 1e-9);
        }
        assert_eq!(recs, recommend(&small_index(40, 17), &q).unwrap());
    }
}

#[test]
fn filtered_recommendations_list_every_eligible_candidate_once() {
    let index = small_index(60, 5);
    let target = &index.profiles()[0];
    let filters = Filters { profession: Some("faculty".into()), ..Filters::none() };
    let q = RecommendationQuery::new(target.id.clone(), Technique::Tfidf).with_k(index.len()).with_filters(filters);
    let recs = recommend(&index, &q).unwrap();
    let eligible = index.profiles().iter().filter(|p| p.id != target.id && p.profession == "faculty").count();
    assert_eq!(recs.len(), eligible);
}
