//! Millisecond UTC timestamps from a strictly increasing clock.

use std::fmt;
use std::sync::atomic::{AtomicI64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

/// Milliseconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn millis(self) -> i64 {
        self.0
    }

    pub fn plus_millis(self, ms: i64) -> Self {
        Timestamp(self.0 + ms)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Every call returns a value greater than the previous one.
pub trait Clock: Send + Sync {
    fn now(&self) -> Timestamp;
    /// Ensures later readings exceed `floor`.
    fn advance_past(&self, floor: Timestamp);
}

/// Wall clock, nudged forward by a millisecond whenever it would repeat or go
/// backwards.
#[derive(Debug, Default)]
pub struct SystemClock {
    last: AtomicI64,
}

impl SystemClock {
    pub fn new() -> Self {
        Self::default()
    }
}

fn wall_millis() -> i64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as i64).unwrap_or(0)
}

impl Clock for SystemClock {
    fn now(&self) -> Timestamp {
        let wall = wall_millis();
        let prev = self.last.fetch_update(Ordering::SeqCst, Ordering::SeqCst, |last| Some(wall.max(last + 1))).unwrap();
        Timestamp(wall.max(prev + 1))
    }

    fn advance_past(&self, floor: Timestamp) {
        self.last.fetch_max(floor.0, Ordering::SeqCst);
    }
}

/// Deterministic clock for tests: starts at a given instant and advances a
/// fixed step per reading.
#[derive(Debug)]
pub struct ManualClock {
    next: AtomicI64,
    step: i64,
}

impl ManualClock {
    pub fn new(start: Timestamp, step: i64) -> Self {
        assert!(step > 0, "step must be positive");
        Self { next: AtomicI64::new(start.0), step }
    }

    /// Moves the clock forward by `ms`.
    pub fn skip(&self, ms: i64) {
        self.next.fetch_add(ms, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Timestamp {
        Timestamp(self.next.fetch_add(self.step, Ordering::SeqCst))
    }

    fn advance_past(&self, floor: Timestamp) {
        self.next.fetch_max(floor.0 + 1, Ordering::SeqCst);
    }
}
