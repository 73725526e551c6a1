use std::sync::Arc;

use collabrec_matchsvc::store::dump;
use collabrec_matchsvc::workload::{self, WorkloadConfig};
use collabrec_matchsvc::{DocumentStore, FileStore, ManualClock, MatchService, MemoryStore, ServiceConfig, Timestamp};
use proptest::prelude::*;
use serde_json::Value;

fn config() -> ServiceConfig {
    ServiceConfig { embedding_dimension: 16, ..Default::default() }
}

fn open(store: Arc<dyn DocumentStore>) -> MatchService {
    MatchService::open(store, Arc::new(ManualClock::new(Timestamp(1_000), 3)), config()).unwrap()
}

/// Checks record invariants straight from the stored JSON.
fn raw_violations(store: &dyn DocumentStore) -> Vec<String> {
    let mut out = Vec::new();
    for (key, doc) in store.scan("matches").unwrap() {
        let both_right = doc["status_a"] == "right" && doc["status_b"] == "right";
        let matched = doc["matched"].as_bool().unwrap();
        if matched != both_right {
            out.push(format!("{key}: matched without mutual right"));
        }
        if !doc["chat"].as_array().unwrap().is_empty() && !matched {
            out.push(format!("{key}: chat without match"));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn random_sequences_keep_invariants_and_replay(seed in any::<u64>()) {
        let service = open(Arc::new(MemoryStore::new()));
        let stats = workload::run(&service, WorkloadConfig { operations: 400, max_users: 8, seed }).unwrap();
        prop_assert_eq!(stats.total(), 400);
        prop_assert_eq!(service.audit().unwrap(), Vec::<String>::new());
        prop_assert_eq!(raw_violations(service.store().as_ref()), Vec::<String>::new());

        let replayed = MatchService::replay(
            &service.events().unwrap(),
            Arc::new(MemoryStore::new()),
            Arc::new(ManualClock::new(Timestamp(0), 1)),
            config(),
        ).unwrap();
        prop_assert_eq!(dump(replayed.store().as_ref()).unwrap(), dump(service.store().as_ref()).unwrap());
    }
}

#[test]
fn file_store_holds_no_plaintext_and_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let store: Arc<dyn DocumentStore> = Arc::new(FileStore::open(dir.path()).unwrap());
    let service = open(store.clone());
    let stats = workload::run(&service, WorkloadConfig { operations: 600, max_users: 10, seed: 11 }).unwrap();
    assert!(stats.accepted["swipe"] > 0 && stats.accepted["message"] > 0 && stats.accepted["rate"] > 0);
    let before = dump(store.as_ref()).unwrap();
    drop(service);

    for entry in walk(dir.path()) {
        let text = std::fs::read_to_string(&entry).unwrap();
        for pw in &stats.passwords {
            assert!(!text.contains(pw.as_str()), "{} contains a password", entry.display());
        }
    }

    let reopened = open(Arc::new(FileStore::open(dir.path()).unwrap()));
    assert_eq!(dump(reopened.store().as_ref()).unwrap(), before);
    let any_match = reopened.match_records().unwrap().into_iter().find(|r| r.matched).unwrap();
    assert!(!reopened.matches(&any_match.user_a).unwrap().is_empty());
    let accounts: Vec<Value> = reopened.store().scan("accounts").unwrap().into_iter().map(|(_, v)| v).collect();
    assert!(accounts.iter().all(|a| a["credential"]["iterations"].as_u64().unwrap() >= 100_000));
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}
