//! Hybrid TF-IDF and dense-embedding profile recommendation for academic
//! collaboration, with affinity-propagation clustering and ranking and
//! clustering evaluation.

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod corpus;
pub mod demo;
pub mod evalmetrics;
pub mod experiment;
pub mod index;
pub mod recommender;
pub mod simcluster;
pub mod vectorize;
