//! The frozen demo corpus bundled with the crate: 200 synthetic profiles
//! (builtin pool, seed 42) and a sample embedding for each of them.

use crate::corpus::{load_profiles_csv, Profile};
use crate::vectorize::FileImportProvider;

pub const SEED: u64 = 42;
pub const SIZE: usize = 200;
/// Profile whose recommendations the experiment reports by default.
pub const TARGET: &str = "s0001";

const PROFILES_CSV: &str = include_str!("../data/demo/profiles.csv");
const EMBEDDINGS_JSONL: &str = include_str!("../data/demo/embeddings.jsonl");

pub fn profiles_csv() -> &'static str {
    PROFILES_CSV
}

pub fn embeddings_jsonl() -> &'static str {
    EMBEDDINGS_JSONL
}

pub fn profiles() -> Vec<Profile> {
    load_profiles_csv(PROFILES_CSV.as_bytes()).expect("bundled demo corpus is valid")
}

pub fn embeddings() -> FileImportProvider {
    FileImportProvider::from_reader(EMBEDDINGS_JSONL.as_bytes()).expect("bundled demo embeddings are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic, write_profiles_csv, SkillPool};
    use crate::vectorize::EmbeddingProvider;

    #[test]
    fn bundled_corpus_matches_generator() {
        let generated = generate_synthetic(&SkillPool::builtin(), SIZE, SEED).unwrap();
        let mut csv = Vec::new();
        write_profiles_csv(&mut csv, &generated).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), PROFILES_CSV);
        assert_eq!(profiles(), generated);
        assert_eq!(profiles()[0].id.as_str(), TARGET);
    }

    #[test]
    fn every_profile_has_an_embedding() {
        let provider = embeddings();
        assert_eq!(provider.len(), SIZE);
        for p in profiles() {
            let v = provider.embed(&p.id, "").unwrap();
            assert_eq!(v.dimension(), provider.dimension());
            assert!(!v.is_zero());
        }
    }
}
