//! Seeded random operation sequences against a [`MatchService`], for soak
//! and state-machine testing. Invalid operations (self swipes, unmatched
//! chat, out-of-range scores, unknown ids) are generated on purpose and are
//! expected to be rejected.

use std::collections::BTreeMap;

use collabrec_core::corpus::{ProfileId, SkillPool};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Direction, MatchId};
use crate::service::{MatchService, NewProfile, ServiceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkloadConfig {
    pub operations: usize,
    pub max_users: usize,
    pub seed: u64,
}

/// Per operation kind: accepted and rejected counts, and rejections by code.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorkloadStats {
    pub accepted: BTreeMap<&'static str, usize>,
    pub rejected: BTreeMap<&'static str, usize>,
    pub rejection_codes: BTreeMap<&'static str, usize>,
    /// Every password handed to `register`, for plaintext scans.
    pub passwords: Vec<String>,
}

impl WorkloadStats {
    pub fn total(&self) -> usize {
        self.accepted.values().sum::<usize>() + self.rejected.values().sum::<usize>()
    }

    fn record<T>(&mut self, kind: &'static str, r: &Result<T, ServiceError>) -> Result<(), String> {
        match r {
            Ok(_) => *self.accepted.entry(kind).or_default() += 1,
            Err(e) if e.code() == "internal" => return Err(format!("{kind}: {e}")),
            Err(e) => {
                *self.rejected.entry(kind).or_default() += 1;
                *self.rejection_codes.entry(e.code()).or_default() += 1;
            }
        }
        Ok(())
    }
}

fn new_user(rng: &mut ChaCha8Rng, pool: &SkillPool, seed: u64, n: usize) -> NewProfile {
    let count = rng.random_range(2..=5);
    let skills: Vec<&str> = pool.skills.choose_multiple(rng, count).map(String::as_str).collect();
    NewProfile {
        name: format!("User {n}"),
        email: format!("user{n}.{seed}@load.example"),
        profession: pool.professions.choose(rng).expect("non-empty").clone(),
        experience: f64::from(rng.random_range(0..=20u32)),
        interest: pool.interests.choose(rng).expect("non-empty").clone(),
        collaboration_with: pool.collaboration_kinds.choose(rng).expect("non-empty").clone(),
        domain: pool.domains.choose(rng).expect("non-empty").clone(),
        skillset: skills.join(", "),
    }
}

/// Runs `config.operations` random operations. Fails on the first internal
/// error; domain rejections are counted.
pub fn run(service: &MatchService, config: WorkloadConfig) -> Result<WorkloadStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pool = SkillPool::builtin();
    let mut stats = WorkloadStats::default();
    let mut users: Vec<ProfileId> = Vec::new();
    let mut matched: Vec<(ProfileId, ProfileId)> = Vec::new();

    for step in 0..config.operations {
        let roll: f64 = rng.random();
        let want_user = users.len() < 2 || (users.len() < config.max_users && roll < 0.03);
        if want_user {
            let n = users.len() + 1;
            let password = format!("pw-{}-{n}-{}", config.seed, rng.random_range(100_000..1_000_000u32));
            let profile = new_user(&mut rng, &pool, config.seed, n);
            // Occasionally a duplicate email or a weak password.
            let (profile, password) = match rng.random_range(0..20) {
                0 if !users.is_empty() => (new_user(&mut rng, &pool, config.seed, 1), password),
                1 => (profile, "short".to_string()),
                _ => (profile, password),
            };
            stats.passwords.push(password.clone());
            let r = service.register(profile, &password);
            if let Ok(acc) = &r {
                users.push(acc.profile_id.clone());
            }
            stats.record("register", &r)?;
            continue;
        }
        let pick = |rng: &mut ChaCha8Rng| -> ProfileId {
            if rng.random_range(0..50) == 0 {
                ProfileId::new(format!("ghost{step}"))
            } else {
                users.choose(rng).expect("users exist").clone()
            }
        };
        let roll: f64 = rng.random();
        if roll < 0.5 {
            let actor = pick(&mut rng);
            let target = pick(&mut rng);
            let direction = if rng.random_bool(0.7) { Direction::Right } else { Direction::Left };
            let r = service.swipe(&actor, &target, direction);
            if let Ok(rec) = &r {
                if rec.matched && !matched.iter().any(|(a, b)| *a == rec.user_a && *b == rec.user_b) {
                    matched.push((rec.user_a.clone(), rec.user_b.clone()));
                }
            }
            stats.record("swipe", &r)?;
        } else if roll < 0.8 {
            let (sender, other) = if !matched.is_empty() && rng.random_bool(0.7) {
                let (a, b) = matched.choose(&mut rng).expect("non-empty").clone();
                let outsider = rng.random_bool(0.1);
                let sender = if outsider {
                    pick(&mut rng)
                } else if rng.random_bool(0.5) {
                    a.clone()
                } else {
                    b.clone()
                };
                (sender, if rng.random_bool(0.5) { a } else { b })
            } else {
                (pick(&mut rng), pick(&mut rng))
            };
            let id = MatchId::for_pair(&sender, &other).0;
            let id = if rng.random_bool(0.1) { MatchId(format!("{}__zz", sender)) } else { id };
            let text = if rng.random_range(0..30) == 0 { " ".to_string() } else { format!("message {step}") };
            let r = service.send_message(&sender, &id, &text);
            stats.record("message", &r)?;
        } else {
            let (rater, target) = if !matched.is_empty() && rng.random_bool(0.7) {
                let (a, b) = matched.choose(&mut rng).expect("non-empty").clone();
                if rng.random_bool(0.5) {
                    (a, b)
                } else {
                    (b, a)
                }
            } else {
                (pick(&mut rng), pick(&mut rng))
            };
            let score = rng.random_range(0..=6i64);
            let r = service.rate(&rater, &target, score);
            stats.record("rate", &r)?;
        }
    }
    Ok(stats)
}
