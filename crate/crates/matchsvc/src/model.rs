//! Persisted service records.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use collabrec_core::corpus::ProfileId;
use serde::{Deserialize, Serialize};

use crate::clock::Timestamp;
use crate::kdf::Credential;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub profile_id: ProfileId,
    /// Lower-cased.
    pub email: String,
    pub credential: Credential,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "right" => Ok(Direction::Right),
            "left" => Ok(Direction::Left),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

/// One participant's swipe on the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwipeStatus {
    #[default]
    Pending,
    Right,
    Left,
}

impl From<Direction> for SwipeStatus {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Right => SwipeStatus::Right,
            Direction::Left => SwipeStatus::Left,
        }
    }
}

/// `<smaller id>__<larger id>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatchId(pub String);

pub const MATCH_ID_SEPARATOR: &str = "__";

impl MatchId {
    /// Id and ordered pair for two distinct users.
    pub fn for_pair(x: &ProfileId, y: &ProfileId) -> (MatchId, ProfileId, ProfileId) {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        (MatchId(format!("{a}{MATCH_ID_SEPARATOR}{b}")), a.clone(), b.clone())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MatchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: ProfileId,
    pub text: String,
    pub at: Timestamp,
}

/// Swipe state between two users, `user_a < user_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub id: MatchId,
    pub user_a: ProfileId,
    pub user_b: ProfileId,
    pub status_a: SwipeStatus,
    pub status_b: SwipeStatus,
    pub matched: bool,
    pub matched_at: Option<Timestamp>,
    pub chat: Vec<Message>,
}

impl MatchRecord {
    pub fn new(x: &ProfileId, y: &ProfileId) -> Self {
        let (id, user_a, user_b) = MatchId::for_pair(x, y);
        Self {
            id,
            user_a,
            user_b,
            status_a: SwipeStatus::Pending,
            status_b: SwipeStatus::Pending,
            matched: false,
            matched_at: None,
            chat: Vec::new(),
        }
    }

    pub fn is_participant(&self, user: &ProfileId) -> bool {
        *user == self.user_a || *user == self.user_b
    }

    pub fn status_of(&self, user: &ProfileId) -> Option<SwipeStatus> {
        if *user == self.user_a {
            Some(self.status_a)
        } else if *user == self.user_b {
            Some(self.status_b)
        } else {
            None
        }
    }

    pub fn other(&self, user: &ProfileId) -> Option<&ProfileId> {
        if *user == self.user_a {
            Some(&self.user_b)
        } else if *user == self.user_b {
            Some(&self.user_a)
        } else {
            None
        }
    }

    /// Records `actor`'s swipe. Once matched, the record no longer changes.
    /// Returns false when `actor` is not a participant.
    pub fn apply_swipe(&mut self, actor: &ProfileId, direction: Direction, at: Timestamp) -> bool {
        if !self.is_participant(actor) {
            return false;
        }
        if self.matched {
            return true;
        }
        if *actor == self.user_a {
            self.status_a = direction.into();
        } else {
            self.status_b = direction.into();
        }
        if self.status_a == SwipeStatus::Right && self.status_b == SwipeStatus::Right {
            self.matched = true;
            self.matched_at = Some(at);
        }
        true
    }

    /// Every structural invariant of a record, as a list of violations.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.user_a >= self.user_b {
            out.push(format!("{}: users not strictly ordered", self.id));
        }
        if MatchId::for_pair(&self.user_a, &self.user_b).0 != self.id {
            out.push(format!("{}: id does not match users", self.id));
        }
        let both_right = self.status_a == SwipeStatus::Right && self.status_b == SwipeStatus::Right;
        if self.matched != both_right {
            out.push(format!(
                "{}: matched={} but statuses {:?}/{:?}",
                self.id, self.matched, self.status_a, self.status_b
            ));
        }
        if self.matched != self.matched_at.is_some() {
            out.push(format!("{}: matched_at inconsistent", self.id));
        }
        if !self.chat.is_empty() && !self.matched {
            out.push(format!("{}: chat on unmatched record", self.id));
        }
        if self.chat.iter().any(|m| !self.is_participant(&m.sender)) {
            out.push(format!("{}: message from non-participant", self.id));
        }
        if self.chat.windows(2).any(|w| w[0].at >= w[1].at) {
            out.push(format!("{}: chat not in strict time order", self.id));
        }
        if let (Some(t), Some(first)) = (self.matched_at, self.chat.first()) {
            if first.at <= t {
                out.push(format!("{}: message before match", self.id));
            }
        }
        out
    }
}

/// Ratings a profile received, one per rater.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingLedger {
    pub profile_id: ProfileId,
    pub ratings: BTreeMap<ProfileId, u8>,
    pub average: f64,
}

impl RatingLedger {
    pub fn new(profile_id: ProfileId) -> Self {
        Self { profile_id, ratings: BTreeMap::new(), average: 0.0 }
    }

    /// Stores `rater`'s score, replacing any earlier one, and returns the new
    /// average.
    pub fn upsert(&mut self, rater: ProfileId, score: u8) -> f64 {
        self.ratings.insert(rater, score);
        self.average = Self::mean(&self.ratings);
        self.average
    }

    fn mean(ratings: &BTreeMap<ProfileId, u8>) -> f64 {
        if ratings.is_empty() {
            return 0.0;
        }
        ratings.values().map(|&s| f64::from(s)).sum::<f64>() / ratings.len() as f64
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.ratings.values().any(|s| !(1..=5).contains(s)) {
            out.push(format!("ratings of {}: score out of range", self.profile_id));
        }
        if self.ratings.contains_key(&self.profile_id) {
            out.push(format!("ratings of {}: self rating", self.profile_id));
        }
        if self.average != Self::mean(&self.ratings) {
            out.push(format!("ratings of {}: stale average", self.profile_id));
        }
        out
    }
}
