//! Accounts, sessions, swipes, chat, ratings and the recommendation feed.
//!
//! All mutations go through one write lock and are recorded as [`Event`]s
//! before the call returns. Reads go straight to the store. The
//! recommendation index is an immutable snapshot rebuilt when the profile set
//! changes.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use collabrec_core::corpus::{Profile, ProfileId, StopWords};
use collabrec_core::index::CorpusIndex;
use collabrec_core::recommender::{self, Filters, RecommendError, RecommendationQuery};
use collabrec_core::vectorize::{HashedProjectionProvider, Technique};
use parking_lot::{Mutex, RwLock};
use rand::RngCore;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::clock::{Clock, Timestamp};
use crate::events::{oplog_key, Event};
use crate::kdf::{Credential, KdfError, KdfParams};
use crate::model::{Account, Direction, MatchId, MatchRecord, Message, RatingLedger};
use crate::store::{DocumentStore, StoreError};

pub const PROFILES: &str = "profiles";
pub const ACCOUNTS: &str = "accounts";
pub const EMAILS: &str = "emails";
pub const MATCHES: &str = "matches";
pub const RATINGS: &str = "ratings";
pub const OPLOG: &str = "oplog";

pub const MIN_PASSWORD_CHARS: usize = 8;
pub const MAX_MESSAGE_CHARS: usize = 4000;
const DAY_MS: i64 = 24 * 60 * 60 * 1000;

/// Broad error classes, one per HTTP status family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Unauthorized,
    Forbidden,
    NotFound,
    Conflict,
    Internal,
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("password must have at least {MIN_PASSWORD_CHARS} characters")]
    WeakPassword,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("email `{0}` is already registered")]
    DuplicateEmail(String),
    #[error("profile id `{0}` already exists")]
    DuplicateId(ProfileId),
    #[error("wrong email or password")]
    BadCredentials,
    #[error("missing or unknown session token")]
    Unauthenticated,
    #[error("session expired")]
    SessionExpired,
    #[error("cannot swipe on yourself")]
    SelfSwipe,
    #[error("cannot rate yourself")]
    SelfRating,
    #[error("score must be an integer from 1 to 5, got {0}")]
    ScoreOutOfRange(i64),
    #[error("only matched collaborators can rate each other")]
    NeverMatched,
    #[error("not a participant of match `{0}`")]
    NotParticipant(MatchId),
    #[error("match `{0}` is not mutual")]
    NotMatched(MatchId),
    #[error("message text must be non-empty and at most {MAX_MESSAGE_CHARS} characters")]
    BadMessage,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("unknown profile `{0}`")]
    UnknownProfile(ProfileId),
    #[error("unknown match `{0}`")]
    UnknownMatch(MatchId),
    #[error(transparent)]
    Kdf(#[from] KdfError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("corrupt document {collection}/{key}: {source}")]
    Corrupt { collection: &'static str, key: String, source: serde_json::Error },
    #[error("recommendation index: {0}")]
    Engine(String),
}

impl ServiceError {
    pub fn kind(&self) -> ErrorKind {
        use ServiceError::*;
        match self {
            WeakPassword | InvalidProfile(_) | ScoreOutOfRange(_) | BadMessage | ZeroK => ErrorKind::Validation,
            BadCredentials | Unauthenticated | SessionExpired => ErrorKind::Unauthorized,
            SelfSwipe | SelfRating | NeverMatched | NotParticipant(_) | NotMatched(_) => ErrorKind::Forbidden,
            UnknownProfile(_) | UnknownMatch(_) => ErrorKind::NotFound,
            DuplicateEmail(_) | DuplicateId(_) => ErrorKind::Conflict,
            Kdf(_) | Store(_) | Corrupt { .. } | Engine(_) => ErrorKind::Internal,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        use ServiceError::*;
        match self {
            WeakPassword => "weak_password",
            InvalidProfile(_) => "invalid_profile",
            DuplicateEmail(_) => "duplicate_email",
            DuplicateId(_) => "duplicate_id",
            BadCredentials => "bad_credentials",
            Unauthenticated => "unauthenticated",
            SessionExpired => "session_expired",
            SelfSwipe => "self_swipe",
            SelfRating => "self_rating",
            ScoreOutOfRange(_) => "score_out_of_range",
            NeverMatched => "never_matched",
            NotParticipant(_) => "not_participant",
            NotMatched(_) => "not_matched",
            BadMessage => "bad_message",
            ZeroK => "bad_k",
            UnknownProfile(_) => "unknown_profile",
            UnknownMatch(_) => "unknown_match",
            Kdf(_) | Store(_) | Corrupt { .. } | Engine(_) => "internal",
        }
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub kdf: KdfParams,
    pub session_ttl_ms: i64,
    pub embedding_dimension: usize,
    pub embedding_seed: u64,
    pub alpha: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            kdf: KdfParams::default(),
            session_ttl_ms: DAY_MS,
            embedding_dimension: HashedProjectionProvider::DEFAULT_DIMENSION,
            embedding_seed: 42,
            alpha: 0.5,
        }
    }
}

/// Profile fields supplied at registration; the id is assigned by the service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewProfile {
    pub name: String,
    pub email: String,
    pub profession: String,
    pub experience: f64,
    pub interest: String,
    pub collaboration_with: String,
    pub domain: String,
    pub skillset: String,
}

impl NewProfile {
    fn into_profile(self, id: ProfileId) -> Profile {
        Profile {
            id,
            name: self.name,
            email: self.email.trim().to_string(),
            profession: self.profession,
            experience: self.experience,
            interest: self.interest,
            collaboration_with: self.collaboration_with,
            domain: self.domain,
            skillset: self.skillset,
            is_synthetic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub token: String,
    pub profile_id: ProfileId,
    pub expires_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub match_id: MatchId,
    pub other_user: ProfileId,
    pub matched_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedItem {
    pub candidate: ProfileId,
    pub name: String,
    pub summary: String,
    pub similarity: f64,
    /// Average rating, absent when the candidate has none.
    pub rating: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EmailEntry {
    profile_id: ProfileId,
}

/// What applying an event produced.
#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Profile(Profile),
    Swipe(MatchRecord),
    Message(Message),
    Rating(f64),
}

struct WriteState {
    next_seq: u64,
    registered: u64,
}

struct EngineSnapshot {
    version: u64,
    index: Option<CorpusIndex>,
}

pub struct MatchService {
    store: Arc<dyn DocumentStore>,
    clock: Arc<dyn Clock>,
    config: ServiceConfig,
    stopwords: StopWords,
    writer: Mutex<WriteState>,
    profiles_version: AtomicU64,
    engine: RwLock<Arc<EngineSnapshot>>,
    rebuild: Mutex<()>,
    sessions: Mutex<HashMap<String, Session>>,
}

fn normalize_email(email: &str) -> String {
    email.trim().to_lowercase()
}

impl MatchService {
    /// Opens a service over `store`, continuing its operation log.
    pub fn open(store: Arc<dyn DocumentStore>, clock: Arc<dyn Clock>, config: ServiceConfig) -> Result<Self> {
        let service = Self {
            store,
            clock,
            config,
            stopwords: StopWords::english(),
            writer: Mutex::new(WriteState { next_seq: 0, registered: 0 }),
            profiles_version: AtomicU64::new(1),
            engine: RwLock::new(Arc::new(EngineSnapshot { version: 0, index: None })),
            rebuild: Mutex::new(()),
            sessions: Mutex::new(HashMap::new()),
        };
        let events = service.events()?;
        {
            let mut w = service.writer.lock();
            w.next_seq = events.len() as u64;
            w.registered = events.iter().filter(|e| matches!(e, Event::ProfileRegistered { .. })).count() as u64;
        }
        if let Some(last) = events.last() {
            service.clock.advance_past(last.at());
        }
        Ok(service)
    }

    /// Applies `events` in order on top of `store` (normally empty).
    pub fn replay(
        events: &[Event],
        store: Arc<dyn DocumentStore>,
        clock: Arc<dyn Clock>,
        config: ServiceConfig,
    ) -> Result<Self> {
        let service = Self::open(store, clock, config)?;
        for event in events {
            let mut w = service.writer.lock();
            service.clock.advance_past(event.at());
            service.commit(&mut w, event.clone())?;
        }
        Ok(service)
    }

    pub fn store(&self) -> &Arc<dyn DocumentStore> {
        &self.store
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    fn read<T: DeserializeOwned>(&self, collection: &'static str, key: &str) -> Result<Option<T>> {
        match self.store.get(collection, key)? {
            None => Ok(None),
            Some(v) => serde_json::from_value(v).map(Some).map_err(|source| ServiceError::Corrupt {
                collection,
                key: key.to_string(),
                source,
            }),
        }
    }

    fn write<T: Serialize>(&self, collection: &'static str, key: &str, value: &T) -> Result<()> {
        let doc = serde_json::to_value(value).expect("records serialize");
        self.store.put(collection, key, &doc)?;
        Ok(())
    }

    fn scan<T: DeserializeOwned>(&self, collection: &'static str) -> Result<Vec<T>> {
        self.store
            .scan(collection)?
            .into_iter()
            .map(|(key, v)| {
                serde_json::from_value(v).map_err(|source| ServiceError::Corrupt { collection, key, source })
            })
            .collect()
    }

    /// The full operation log in commit order.
    pub fn events(&self) -> Result<Vec<Event>> {
        self.scan(OPLOG)
    }

    pub fn profile(&self, id: &ProfileId) -> Result<Option<Profile>> {
        self.read(PROFILES, id.as_str())
    }

    pub fn profiles(&self) -> Result<Vec<Profile>> {
        self.scan(PROFILES)
    }

    pub fn account(&self, id: &ProfileId) -> Result<Option<Account>> {
        self.read(ACCOUNTS, id.as_str())
    }

    pub fn match_record(&self, id: &MatchId) -> Result<Option<MatchRecord>> {
        self.read(MATCHES, id.as_str())
    }

    pub fn match_records(&self) -> Result<Vec<MatchRecord>> {
        self.scan(MATCHES)
    }

    pub fn ratings(&self, id: &ProfileId) -> Result<Option<RatingLedger>> {
        self.read(RATINGS, id.as_str())
    }

    fn require_profile(&self, id: &ProfileId) -> Result<Profile> {
        self.profile(id)?.ok_or_else(|| ServiceError::UnknownProfile(id.clone()))
    }

    // Mutations.

    /// Validates `event` against the current state, applies it and appends it
    /// to the log. Callers hold the write lock.
    fn commit(&self, w: &mut WriteState, event: Event) -> Result<Outcome> {
        let outcome = self.apply(&event)?;
        self.write(OPLOG, &oplog_key(w.next_seq), &event)?;
        w.next_seq += 1;
        if matches!(event, Event::ProfileRegistered { .. }) {
            w.registered += 1;
        }
        tracing::debug!(seq = w.next_seq - 1, kind = event.kind(), "committed");
        Ok(outcome)
    }

    fn apply(&self, event: &Event) -> Result<Outcome> {
        match event {
            Event::ProfileRegistered { at, profile, credential } => {
                self.insert_profile(profile)?;
                let account = Account {
                    profile_id: profile.id.clone(),
                    email: normalize_email(&profile.email),
                    credential: credential.clone(),
                    created_at: *at,
                };
                self.write(ACCOUNTS, profile.id.as_str(), &account)?;
                Ok(Outcome::Profile(profile.clone()))
            }
            Event::ProfileImported { profile, .. } => {
                self.insert_profile(profile)?;
                Ok(Outcome::Profile(profile.clone()))
            }
            Event::Swiped { at, actor, target, direction } => {
                if actor == target {
                    return Err(ServiceError::SelfSwipe);
                }
                self.require_profile(actor)?;
                self.require_profile(target)?;
                let (id, _, _) = MatchId::for_pair(actor, target);
                let mut record = self.match_record(&id)?.unwrap_or_else(|| MatchRecord::new(actor, target));
                record.apply_swipe(actor, *direction, *at);
                self.write(MATCHES, id.as_str(), &record)?;
                Ok(Outcome::Swipe(record))
            }
            Event::MessageSent { at, match_id, sender, text } => {
                let mut record =
                    self.match_record(match_id)?.ok_or_else(|| ServiceError::UnknownMatch(match_id.clone()))?;
                if !record.is_participant(sender) {
                    return Err(ServiceError::NotParticipant(match_id.clone()));
                }
                if !record.matched {
                    return Err(ServiceError::NotMatched(match_id.clone()));
                }
                let chars = text.chars().count();
                if text.trim().is_empty() || chars > MAX_MESSAGE_CHARS {
                    return Err(ServiceError::BadMessage);
                }
                let message = Message { sender: sender.clone(), text: text.clone(), at: *at };
                record.chat.push(message.clone());
                self.write(MATCHES, match_id.as_str(), &record)?;
                Ok(Outcome::Message(message))
            }
            Event::Rated { rater, target, score, .. } => {
                if rater == target {
                    return Err(ServiceError::SelfRating);
                }
                if !(1..=5).contains(score) {
                    return Err(ServiceError::ScoreOutOfRange(i64::from(*score)));
                }
                self.require_profile(rater)?;
                self.require_profile(target)?;
                let (id, _, _) = MatchId::for_pair(rater, target);
                if !self.match_record(&id)?.is_some_and(|r| r.matched) {
                    return Err(ServiceError::NeverMatched);
                }
                let mut ledger = self.ratings(target)?.unwrap_or_else(|| RatingLedger::new(target.clone()));
                let average = ledger.upsert(rater.clone(), *score);
                self.write(RATINGS, target.as_str(), &ledger)?;
                Ok(Outcome::Rating(average))
            }
        }
    }

    fn insert_profile(&self, profile: &Profile) -> Result<()> {
        profile.validate().map_err(|e| ServiceError::InvalidProfile(e.to_string()))?;
        if profile.id.as_str().trim().is_empty() {
            return Err(ServiceError::InvalidProfile("empty id".into()));
        }
        let email = normalize_email(&profile.email);
        if self.store.get(EMAILS, &email)?.is_some() {
            return Err(ServiceError::DuplicateEmail(email));
        }
        if self.store.get(PROFILES, profile.id.as_str())?.is_some() {
            return Err(ServiceError::DuplicateId(profile.id.clone()));
        }
        self.write(PROFILES, profile.id.as_str(), profile)?;
        self.write(EMAILS, &email, &EmailEntry { profile_id: profile.id.clone() })?;
        self.profiles_version.fetch_add(1, Ordering::SeqCst);
        Ok(())
    }

    /// Creates an account. The password is digested before the write lock is
    /// taken; only the salted digest is stored.
    pub fn register(&self, new: NewProfile, password: &str) -> Result<Account> {
        if password.chars().count() < MIN_PASSWORD_CHARS {
            return Err(ServiceError::WeakPassword);
        }
        let probe = new.clone().into_profile(ProfileId::new("pending"));
        probe.validate().map_err(|e| ServiceError::InvalidProfile(e.to_string()))?;
        let email = normalize_email(&probe.email);
        if self.store.get(EMAILS, &email)?.is_some() {
            return Err(ServiceError::DuplicateEmail(email));
        }
        let credential = Credential::create(password, self.config.kdf);

        let mut w = self.writer.lock();
        let mut n = w.registered + 1;
        let id = loop {
            let id = ProfileId::new(format!("u{n:05}"));
            if self.store.get(PROFILES, id.as_str())?.is_none() {
                break id;
            }
            n += 1;
        };
        let at = self.clock.now();
        let profile = new.into_profile(id.clone());
        self.commit(&mut w, Event::ProfileRegistered { at, profile, credential: credential.clone() })?;
        Ok(Account { profile_id: id, email, credential, created_at: at })
    }

    /// Adds a profile without an account, keeping its id.
    pub fn import_profile(&self, profile: Profile) -> Result<()> {
        let mut w = self.writer.lock();
        let at = self.clock.now();
        self.commit(&mut w, Event::ProfileImported { at, profile })?;
        Ok(())
    }

    pub fn swipe(&self, actor: &ProfileId, target: &ProfileId, direction: Direction) -> Result<MatchRecord> {
        let mut w = self.writer.lock();
        let at = self.clock.now();
        match self.commit(&mut w, Event::Swiped { at, actor: actor.clone(), target: target.clone(), direction })? {
            Outcome::Swipe(r) => Ok(r),
            _ => unreachable!("swipe event yields a record"),
        }
    }

    pub fn send_message(&self, sender: &ProfileId, match_id: &MatchId, text: &str) -> Result<Message> {
        let mut w = self.writer.lock();
        let at = self.clock.now();
        let event =
            Event::MessageSent { at, match_id: match_id.clone(), sender: sender.clone(), text: text.to_string() };
        match self.commit(&mut w, event)? {
            Outcome::Message(m) => Ok(m),
            _ => unreachable!("message event yields a message"),
        }
    }

    /// Records `rater`'s score for `target` and returns the new average.
    pub fn rate(&self, rater: &ProfileId, target: &ProfileId, score: i64) -> Result<f64> {
        let score =
            u8::try_from(score).ok().filter(|s| (1..=5).contains(s)).ok_or(ServiceError::ScoreOutOfRange(score))?;
        let mut w = self.writer.lock();
        let at = self.clock.now();
        match self.commit(&mut w, Event::Rated { at, rater: rater.clone(), target: target.clone(), score })? {
            Outcome::Rating(avg) => Ok(avg),
            _ => unreachable!("rating event yields an average"),
        }
    }

    // Sessions.

    pub fn login(&self, email: &str, password: &str) -> Result<Session> {
        let entry: Option<EmailEntry> = self.read(EMAILS, &normalize_email(email))?;
        let Some(entry) = entry else {
            return Err(ServiceError::BadCredentials);
        };
        let Some(account) = self.account(&entry.profile_id)? else {
            return Err(ServiceError::BadCredentials);
        };
        if !account.credential.verify(password)? {
            return Err(ServiceError::BadCredentials);
        }
        let mut bytes = [0u8; 32];
        rand::rng().fill_bytes(&mut bytes);
        let session = Session {
            token: hex::encode(bytes),
            profile_id: account.profile_id,
            expires_at: self.clock.now().plus_millis(self.config.session_ttl_ms),
        };
        self.sessions.lock().insert(session.token.clone(), session.clone());
        Ok(session)
    }

    /// Resolves a bearer token to its user.
    pub fn authenticate(&self, token: &str) -> Result<ProfileId> {
        let mut sessions = self.sessions.lock();
        let session = sessions.get(token).ok_or(ServiceError::Unauthenticated)?;
        if self.clock.now() >= session.expires_at {
            sessions.remove(token);
            return Err(ServiceError::SessionExpired);
        }
        Ok(session.profile_id.clone())
    }

    // Queries.

    /// Mutual matches of `viewer`, oldest first.
    pub fn matches(&self, viewer: &ProfileId) -> Result<Vec<MatchSummary>> {
        let mut out: Vec<MatchSummary> = self
            .match_records()?
            .into_iter()
            .filter(|r| r.matched && r.is_participant(viewer))
            .map(|r| MatchSummary {
                other_user: r.other(viewer).expect("participant").clone(),
                matched_at: r.matched_at.expect("matched records carry a time"),
                match_id: r.id,
            })
            .collect();
        out.sort_by(|a, b| a.matched_at.cmp(&b.matched_at).then_with(|| a.match_id.cmp(&b.match_id)));
        Ok(out)
    }

    /// Messages of a mutual match newer than `since`, in send order.
    pub fn messages(&self, viewer: &ProfileId, match_id: &MatchId, since: Option<Timestamp>) -> Result<Vec<Message>> {
        let record = self.match_record(match_id)?.ok_or_else(|| ServiceError::UnknownMatch(match_id.clone()))?;
        if !record.is_participant(viewer) {
            return Err(ServiceError::NotParticipant(match_id.clone()));
        }
        if !record.matched {
            return Err(ServiceError::NotMatched(match_id.clone()));
        }
        Ok(record.chat.into_iter().filter(|m| since.is_none_or(|s| m.at > s)).collect())
    }

    fn engine(&self) -> Result<Arc<EngineSnapshot>> {
        let want = self.profiles_version.load(Ordering::SeqCst);
        let current = self.engine.read().clone();
        if current.version == want {
            return Ok(current);
        }
        let _guard = self.rebuild.lock();
        let current = self.engine.read().clone();
        if current.version == want {
            return Ok(current);
        }
        let profiles = self.profiles()?;
        let index = if profiles.is_empty() {
            None
        } else {
            let provider = HashedProjectionProvider::new(self.config.embedding_dimension, self.config.embedding_seed);
            Some(
                CorpusIndex::build(profiles, &self.stopwords, &provider, self.config.alpha)
                    .map_err(|e| ServiceError::Engine(e.to_string()))?,
            )
        };
        let snapshot = Arc::new(EngineSnapshot { version: want, index });
        *self.engine.write() = snapshot.clone();
        tracing::info!(version = want, "recommendation index rebuilt");
        Ok(snapshot)
    }

    /// Top-`k` hybrid recommendations for `viewer`, leaving out everyone the
    /// viewer already swiped on.
    pub fn feed(&self, viewer: &ProfileId, k: usize) -> Result<Vec<FeedItem>> {
        if k == 0 {
            return Err(ServiceError::ZeroK);
        }
        self.require_profile(viewer)?;
        let swiped: HashSet<ProfileId> = self
            .match_records()?
            .into_iter()
            .filter(|r| r.status_of(viewer).is_some_and(|s| s != crate::model::SwipeStatus::Pending))
            .filter_map(|r| r.other(viewer).cloned())
            .collect();
        let engine = self.engine()?;
        let Some(index) = engine.index.as_ref() else {
            return Ok(Vec::new());
        };
        let query = RecommendationQuery::new(viewer.clone(), Technique::Hybrid).with_k(k).with_filters(Filters::none());
        let recs = match recommender::recommend_excluding(index, &query, &swiped) {
            Ok(r) => r,
            Err(RecommendError::NoCandidates(_)) => return Ok(Vec::new()),
            // Registered after the snapshot was taken; it has no candidates yet.
            Err(RecommendError::UnknownTarget(_)) => return Ok(Vec::new()),
            Err(e) => return Err(ServiceError::Engine(e.to_string())),
        };
        recs.into_iter()
            .map(|r| {
                let p = index.profile(index.position(&r.candidate_id).expect("candidate from index"));
                let rating = self.ratings(&r.candidate_id)?.filter(|l| !l.ratings.is_empty()).map(|l| l.average);
                Ok(FeedItem {
                    candidate: r.candidate_id,
                    name: p.name.clone(),
                    summary: p.summary(),
                    similarity: r.similarity,
                    rating,
                })
            })
            .collect()
    }

    /// Every invariant violation found in the store.
    pub fn audit(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let records = self.match_records()?;
        let matched: HashSet<&MatchId> = records.iter().filter(|r| r.matched).map(|r| &r.id).collect();
        for r in &records {
            out.extend(r.violations());
        }
        for ledger in self.scan::<RatingLedger>(RATINGS)? {
            out.extend(ledger.violations());
            for rater in ledger.ratings.keys() {
                if !matched.contains(&MatchId::for_pair(rater, &ledger.profile_id).0) {
                    out.push(format!("rating by {rater} on {} without a match", ledger.profile_id));
                }
            }
        }
        let profiles = self.profiles()?;
        let emails: Vec<EmailEntry> = self.scan(EMAILS)?;
        if emails.len() != profiles.len() {
            out.push(format!("{} email entries for {} profiles", emails.len(), profiles.len()));
        }
        let ids: HashSet<&ProfileId> = profiles.iter().map(|p| &p.id).collect();
        for account in self.scan::<Account>(ACCOUNTS)? {
            if !ids.contains(&account.profile_id) {
                out.push(format!("account {} has no profile", account.profile_id));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::ManualClock;
    use crate::store::{dump, MemoryStore};

    pub(crate) fn new_profile(name: &str, domain: &str, skills: &str) -> NewProfile {
        NewProfile {
            name: name.into(),
            email: format!("{}@example.edu", name.to_lowercase()),
            profession: "student".into(),
            experience: 2.0,
            interest: "project".into(),
            collaboration_with: "faculty".into(),
            domain: domain.into(),
            skillset: skills.into(),
        }
    }

    fn service() -> MatchService {
        MatchService::open(
            Arc::new(MemoryStore::new()),
            Arc::new(ManualClock::new(Timestamp(1_000), 1)),
            ServiceConfig { embedding_dimension: 32, ..Default::default() },
        )
        .unwrap()
    }

    fn users(s: &MatchService) -> (ProfileId, ProfileId, ProfileId) {
        let a = s.register(new_profile("Ann", "Cybersecurity", "C, Python"), "password-a").unwrap();
        let b = s.register(new_profile("Bob", "Cybersecurity", "Python, Networking"), "password-b").unwrap();
        let c = s.register(new_profile("Cai", "Web Development", "HTML, CSS"), "password-c").unwrap();
        (a.profile_id, b.profile_id, c.profile_id)
    }

    #[test]
    fn register_and_login() {
        let s = service();
        let acc = s.register(new_profile("Ann", "AI", "Python"), "s3cret-pass").unwrap();
        assert_eq!(acc.profile_id.as_str(), "u00001");
        let session = s.login("ANN@example.edu ", "s3cret-pass").unwrap();
        assert_eq!(s.authenticate(&session.token).unwrap(), acc.profile_id);
        assert!(matches!(s.login("ann@example.edu", "wrong-pass"), Err(ServiceError::BadCredentials)));
        assert!(matches!(s.login("nobody@example.edu", "s3cret-pass"), Err(ServiceError::BadCredentials)));
        assert!(matches!(s.authenticate("nope"), Err(ServiceError::Unauthenticated)));
    }

    #[test]
    fn registration_errors() {
        let s = service();
        assert!(matches!(s.register(new_profile("Ann", "AI", "Python"), "short"), Err(ServiceError::WeakPassword)));
        s.register(new_profile("Ann", "AI", "Python"), "long enough").unwrap();
        let err = s.register(new_profile("ann", "AI", "Python"), "long enough").unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Conflict);
        let mut bad = new_profile("Eve", "AI", "Python");
        bad.skillset = "  ".into();
        assert_eq!(s.register(bad, "long enough").unwrap_err().kind(), ErrorKind::Validation);
    }

    #[test]
    fn sessions_expire() {
        let clock = Arc::new(ManualClock::new(Timestamp(0), 1));
        let s = MatchService::open(
            Arc::new(MemoryStore::new()),
            clock.clone(),
            ServiceConfig { embedding_dimension: 8, session_ttl_ms: 100, ..Default::default() },
        )
        .unwrap();
        s.register(new_profile("Ann", "AI", "Python"), "long enough").unwrap();
        let session = s.login("ann@example.edu", "long enough").unwrap();
        assert!(s.authenticate(&session.token).is_ok());
        clock.skip(1_000);
        assert!(matches!(s.authenticate(&session.token), Err(ServiceError::SessionExpired)));
        assert!(matches!(s.authenticate(&session.token), Err(ServiceError::Unauthenticated)));
    }

    #[test]
    fn swipe_match_chat_rate_flow() {
        let s = service();
        let (a, b, c) = users(&s);
        assert!(matches!(s.swipe(&a, &a, Direction::Right), Err(ServiceError::SelfSwipe)));
        assert!(matches!(s.swipe(&a, &"zz".into(), Direction::Right), Err(ServiceError::UnknownProfile(_))));
        let r = s.swipe(&a, &b, Direction::Right).unwrap();
        assert!(!r.matched);
        // Idempotent repeat.
        assert_eq!(s.swipe(&a, &b, Direction::Right).unwrap().status_a, r.status_a);
        assert!(matches!(s.send_message(&a, &r.id, "hi"), Err(ServiceError::NotMatched(_))));
        assert!(matches!(s.rate(&a, &b, 4), Err(ServiceError::NeverMatched)));
        let r = s.swipe(&b, &a, Direction::Right).unwrap();
        assert!(r.matched);

        s.send_message(&a, &r.id, "hello").unwrap();
        let second = s.send_message(&b, &r.id, "hi back").unwrap();
        assert!(matches!(s.send_message(&c, &r.id, "me too"), Err(ServiceError::NotParticipant(_))));
        assert!(matches!(s.send_message(&a, &r.id, "   "), Err(ServiceError::BadMessage)));
        let texts: Vec<_> = s.messages(&b, &r.id, None).unwrap().into_iter().map(|m| m.text).collect();
        assert_eq!(texts, ["hello", "hi back"]);
        let first_at = s.messages(&a, &r.id, None).unwrap()[0].at;
        assert_eq!(s.messages(&a, &r.id, Some(first_at)).unwrap(), vec![second]);
        assert!(matches!(s.messages(&c, &r.id, None), Err(ServiceError::NotParticipant(_))));

        assert_eq!(s.matches(&a).unwrap()[0].other_user, b);
        assert_eq!(s.matches(&b).unwrap()[0].match_id, r.id);
        assert!(s.matches(&c).unwrap().is_empty());

        assert_eq!(s.rate(&a, &b, 3).unwrap(), 3.0);
        assert_eq!(s.rate(&a, &b, 5).unwrap(), 5.0);
        assert!(matches!(s.rate(&a, &b, 6), Err(ServiceError::ScoreOutOfRange(6))));
        assert!(matches!(s.rate(&a, &a, 5), Err(ServiceError::SelfRating)));
        assert!(s.audit().unwrap().is_empty());
    }

    #[test]
    fn average_over_raters() {
        let s = service();
        let (a, b, c) = users(&s);
        for x in [&a, &c] {
            s.swipe(x, &b, Direction::Right).unwrap();
            s.swipe(&b, x, Direction::Right).unwrap();
        }
        s.rate(&a, &b, 4).unwrap();
        assert_eq!(s.rate(&c, &b, 5).unwrap(), 4.5);
    }

    #[test]
    fn feed_excludes_self_and_swiped_and_carries_ratings() {
        let s = service();
        let (a, b, c) = users(&s);
        let feed = s.feed(&a, 5).unwrap();
        assert_eq!(feed.len(), 2);
        assert_eq!(feed[0].candidate, b, "shared domain ranks first");
        assert!(feed.iter().all(|f| f.candidate != a));
        assert!(feed.iter().all(|f| f.rating.is_none()));

        s.swipe(&c, &b, Direction::Right).unwrap();
        s.swipe(&b, &c, Direction::Right).unwrap();
        s.rate(&c, &b, 4).unwrap();
        let feed = s.feed(&a, 5).unwrap();
        assert_eq!(feed.iter().find(|f| f.candidate == b).unwrap().rating, Some(4.0));

        s.swipe(&a, &b, Direction::Left).unwrap();
        s.swipe(&a, &c, Direction::Right).unwrap();
        assert!(s.feed(&a, 5).unwrap().is_empty());
        // b swiped on a only implicitly through a's record; b still sees a.
        assert_eq!(s.feed(&b, 5).unwrap().len(), 1);
    }

    #[test]
    fn replay_reproduces_store() {
        let s = service();
        let (a, b, c) = users(&s);
        s.swipe(&a, &b, Direction::Right).unwrap();
        s.swipe(&b, &a, Direction::Right).unwrap();
        let m = s.swipe(&c, &a, Direction::Left).unwrap();
        let _ = s.send_message(&c, &m.id, "blocked");
        s.send_message(&a, &MatchId::for_pair(&a, &b).0, "hi").unwrap();
        s.rate(&b, &a, 2).unwrap();
        let events = s.events().unwrap();
        assert_eq!(events.len(), 3 + 3 + 1 + 1);

        let replayed = MatchService::replay(
            &events,
            Arc::new(MemoryStore::new()),
            Arc::new(ManualClock::new(Timestamp(0), 1)),
            s.config().clone(),
        )
        .unwrap();
        assert_eq!(dump(replayed.store().as_ref()).unwrap(), dump(s.store().as_ref()).unwrap());
    }

    #[test]
    fn reopen_continues_log_and_clock() {
        let store: Arc<dyn DocumentStore> = Arc::new(MemoryStore::new());
        let config = ServiceConfig { embedding_dimension: 8, ..Default::default() };
        let s =
            MatchService::open(store.clone(), Arc::new(ManualClock::new(Timestamp(500), 1)), config.clone()).unwrap();
        let (a, b, _) = users(&s);
        s.swipe(&a, &b, Direction::Right).unwrap();
        drop(s);
        let s = MatchService::open(store, Arc::new(ManualClock::new(Timestamp(0), 1)), config).unwrap();
        let d = s.register(new_profile("Dee", "AI", "Python"), "password-d").unwrap();
        assert_eq!(d.profile_id.as_str(), "u00004");
        let events = s.events().unwrap();
        assert_eq!(events.len(), 5);
        assert!(events.windows(2).all(|w| w[0].at() < w[1].at()));
    }

    #[test]
    fn imported_profiles_are_swipeable_but_cannot_log_in() {
        let s = service();
        let (a, _, _) = users(&s);
        let mut p = collabrec_core::corpus::generate_synthetic(&collabrec_core::corpus::SkillPool::builtin(), 1, 1)
            .unwrap()
            .remove(0);
        let email = p.email.clone();
        s.import_profile(p.clone()).unwrap();
        assert!(matches!(s.login(&email, "whatever-pass"), Err(ServiceError::BadCredentials)));
        s.swipe(&a, &p.id, Direction::Right).unwrap();
        p.email = "other@example.edu".into();
        assert!(matches!(s.import_profile(p), Err(ServiceError::DuplicateId(_))));
    }
}
