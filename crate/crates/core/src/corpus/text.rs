use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{porter, Profile, ProfileId};

const ENGLISH_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

/// Active stop-word list. Entries are matched against lower-cased tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords {
    words: HashSet<String>,
}

impl StopWords {
    /// The frozen 179-word English list bundled with the crate.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    pub fn empty() -> Self {
        Self { words: HashSet::new() }
    }

    /// One word per line; blank lines ignored.
    pub fn parse(text: &str) -> Self {
        let words = text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty()).collect();
        Self { words }
    }

    pub fn from_path(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::english()
    }
}

/// Normalized token list for one profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDocument {
    pub profile_id: ProfileId,
    pub tokens: Vec<String>,
    pub raw_text: String,
}

impl TokenDocument {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '+' || c == '#'
}

/// Lower-cases `text` and splits it on every character that is not
/// alphanumeric, `+` or `#`. Tokens with no alphanumeric character and stop
/// words are dropped.
pub fn tokenize(text: &str, stopwords: &StopWords) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !is_token_char(c))
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .filter(|t| !stopwords.contains(t))
        .map(str::to_string)
        .collect()
}

/// Combines domain and skillset and tokenizes them.
pub fn preprocess(profile: &Profile, stopwords: &StopWords) -> TokenDocument {
    let raw_text = profile.combined_text();
    TokenDocument { profile_id: profile.id.clone(), tokens: tokenize(&raw_text, stopwords), raw_text }
}

/// Porter-stems every purely alphabetic (ASCII) token; anything else, such as
/// `c++` or `web3`, passes through untouched.
pub fn stem_tokens(doc: &TokenDocument) -> TokenDocument {
    TokenDocument {
        profile_id: doc.profile_id.clone(),
        tokens: doc
            .tokens
            .iter()
            .map(|t| if t.bytes().all(|b| b.is_ascii_lowercase()) { porter::stem(t) } else { t.clone() })
            .collect(),
        raw_text: doc.raw_text.clone(),
    }
}
