//! Profile data model, survey ingestion, synthetic generation and text
//! preprocessing.
//!
//! Profiles come in as CSV or JSON-lines records carrying the eight survey
//! columns (`name, email, profession, experience, interest,
//! collaboration_with, domain, skillset`). Two optional columns are also
//! understood: `id` (otherwise one is assigned from the record position) and
//! `is_synthetic`.

mod ingest;
mod pool;
mod porter;
mod text;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use ingest::{load_profiles, load_profiles_csv, load_profiles_jsonl, write_profiles_csv, RecordError};
pub use pool::{generate_synthetic, SkillPool};
pub use porter::stem;
pub use text::{preprocess, stem_tokens, tokenize, StopWords, TokenDocument};

/// Opaque profile identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProfileId(pub String);

impl ProfileId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProfileId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// One user record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub id: ProfileId,
    pub name: String,
    pub email: String,
    pub profession: String,
    /// Years of experience, never negative.
    pub experience: f64,
    /// Type of academic activity the user is after.
    pub interest: String,
    /// Preferred collaborator kind, e.g. "faculty" or "student".
    pub collaboration_with: String,
    pub domain: String,
    /// Comma-separated skill names.
    pub skillset: String,
    #[serde(default)]
    pub is_synthetic: bool,
}

impl Profile {
    /// Checks the single-record invariants. Email uniqueness is a corpus
    /// property and is checked by the loaders.
    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.email.trim().is_empty() {
            return Err(ProfileError::EmptyField("email"));
        }
        if !self.experience.is_finite() || self.experience < 0.0 {
            return Err(ProfileError::NegativeExperience(self.experience));
        }
        if self.domain.trim().is_empty() {
            return Err(ProfileError::EmptyField("domain"));
        }
        if self.skillset.trim().is_empty() {
            return Err(ProfileError::EmptyField("skillset"));
        }
        Ok(())
    }

    /// Domain followed by skillset, the text every representation is built from.
    pub fn combined_text(&self) -> String {
        format!("{} {}", self.domain, self.skillset)
    }

    /// "Domain, skills" summary used in tables and the feed.
    pub fn summary(&self) -> String {
        format!("{}, {}", self.domain.trim(), self.skillset.trim())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("field `{0}` is empty")]
    EmptyField(&'static str),
    #[error("experience must be a non-negative number, got {0}")]
    NegativeExperience(f64),
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{} invalid record(s): {}", .0.len(), first_error(.0))]
    InvalidRecords(Vec<RecordError>),
    #[error("skill pool list `{0}` is empty")]
    EmptyPoolList(&'static str),
    #[error("skill pool list `{list}` has duplicate entry `{entry}`")]
    DuplicatePoolEntry { list: &'static str, entry: String },
    #[error("synthetic profile count must be at least 1")]
    ZeroCount,
    #[error("unsupported profile file extension: {0}")]
    UnsupportedFormat(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn first_error(errors: &[RecordError]) -> String {
    errors.first().map(|e| e.to_string()).unwrap_or_default()
}

#[cfg(test)]
pub(crate) fn sample_profile(id: &str, domain: &str, skillset: &str) -> Profile {
    Profile {
        id: ProfileId::new(id),
        name: format!("User {id}"),
        email: format!("{id}@example.edu"),
        profession: "student".into(),
        experience: 1.0,
        interest: "research paper".into(),
        collaboration_with: "faculty".into(),
        domain: domain.into(),
        skillset: skillset.into(),
        is_synthetic: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rejects_bad_fields() {
        let mut p = sample_profile("a", "AI", "Python");
        assert!(p.validate().is_ok());
        p.experience = -1.0;
        assert_eq!(p.validate(), Err(ProfileError::NegativeExperience(-1.0)));
        p.experience = 0.0;
        p.skillset = "   ".into();
        assert_eq!(p.validate(), Err(ProfileError::EmptyField("skillset")));
        p.skillset = "Python".into();
        p.email.clear();
        assert_eq!(p.validate(), Err(ProfileError::EmptyField("email")));
    }

    #[test]
    fn combined_text_is_domain_then_skills() {
        let p = sample_profile("a", "Cybersecurity", "C, C++, Python");
        assert_eq!(p.combined_text(), "Cybersecurity C, C++, Python");
    }
}
