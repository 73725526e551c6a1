//! Networking service: accounts with salted password digests, swipe-based
//! mutual matching, per-match chat, collaborator ratings and a
//! recommendation feed, persisted through a pluggable document store and
//! served over HTTP/JSON.

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod clock;
pub mod events;
pub mod http;
pub mod kdf;
pub mod model;
pub mod service;
pub mod store;
pub mod workload;

pub use clock::{Clock, ManualClock, SystemClock, Timestamp};
pub use events::Event;
pub use kdf::{Credential, KdfParams};
pub use model::{Account, Direction, MatchId, MatchRecord, Message, RatingLedger, SwipeStatus};
pub use service::{ErrorKind, FeedItem, MatchService, MatchSummary, NewProfile, ServiceConfig, ServiceError, Session};
pub use store::{DocumentStore, FileStore, MemoryStore, StoreError};
