//! The operation log. Every committed mutation is one event; applying the
//! events in order to an empty store reproduces the store.

use collabrec_core::corpus::{Profile, ProfileId};
use serde::{Deserialize, Serialize};

use crate::clock::Timestamp;
use crate::kdf::Credential;
use crate::model::{Direction, MatchId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    /// A user account with its profile.
    ProfileRegistered {
        at: Timestamp,
        profile: Profile,
        credential: Credential,
    },
    /// A profile without an account: it can be recommended and swiped on but
    /// cannot log in.
    ProfileImported {
        at: Timestamp,
        profile: Profile,
    },
    Swiped {
        at: Timestamp,
        actor: ProfileId,
        target: ProfileId,
        direction: Direction,
    },
    MessageSent {
        at: Timestamp,
        match_id: MatchId,
        sender: ProfileId,
        text: String,
    },
    Rated {
        at: Timestamp,
        rater: ProfileId,
        target: ProfileId,
        score: u8,
    },
}

impl Event {
    pub fn at(&self) -> Timestamp {
        match self {
            Event::ProfileRegistered { at, .. }
            | Event::ProfileImported { at, .. }
            | Event::Swiped { at, .. }
            | Event::MessageSent { at, .. }
            | Event::Rated { at, .. } => *at,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Event::ProfileRegistered { .. } => "profile_registered",
            Event::ProfileImported { .. } => "profile_imported",
            Event::Swiped { .. } => "swiped",
            Event::MessageSent { .. } => "message_sent",
            Event::Rated { .. } => "rated",
        }
    }
}

/// Store key of the `seq`-th event; zero padded so key order is log order.
pub fn oplog_key(seq: u64) -> String {
    format!("{seq:012}")
}
