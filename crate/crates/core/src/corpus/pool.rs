use std::collections::HashSet;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Profile, ProfileId};

const BUILTIN_POOL: &str = include_str!("../../data/skill_pool.json");

const FIRST_NAMES: &[&str] = &[
    "Aarav", "Alexis", "Ananya", "Arjun", "Chen", "Daniel", "Diya", "Elena", "Farah", "Gregory", "Hana", "Ishaan",
    "Jacob", "Joan", "Joshua", "Kavya", "Lucas", "Maya", "Nikhil", "Olivia", "Paula", "Priya", "Rahul", "Sara",
    "Tomas", "Varun", "Wei", "Yusuf", "Zara", "Meera",
];

const LAST_NAMES: &[&str] = &[
    "Evans",
    "Williamson",
    "Moore",
    "Hughes",
    "Harper",
    "Russell",
    "Hammond",
    "Iyer",
    "Kumar",
    "Nair",
    "Sharma",
    "Garcia",
    "Okafor",
    "Tanaka",
    "Mueller",
    "Rossi",
    "Silva",
    "Khan",
    "Lee",
    "Novak",
    "Patel",
    "Reddy",
    "Singh",
    "Thomas",
    "Verma",
    "Joshi",
    "Menon",
    "Das",
    "Ali",
    "Costa",
];

/// Hand-curated pool of values the synthetic generator draws from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillPool {
    pub skills: Vec<String>,
    pub domains: Vec<String>,
    pub professions: Vec<String>,
    pub interests: Vec<String>,
    pub collaboration_kinds: Vec<String>,
}

impl SkillPool {
    /// The pool shipped with the crate.
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN_POOL).expect("bundled skill pool is valid JSON")
    }

    pub fn from_json(json: &str) -> Result<Self, CorpusError> {
        let pool: SkillPool = serde_json::from_str(json)?;
        pool.validate()?;
        Ok(pool)
    }

    pub fn from_path(path: &Path) -> Result<Self, CorpusError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let lists: [(&'static str, &Vec<String>); 5] = [
            ("skills", &self.skills),
            ("domains", &self.domains),
            ("professions", &self.professions),
            ("interests", &self.interests),
            ("collaboration_kinds", &self.collaboration_kinds),
        ];
        for (name, list) in lists {
            if list.is_empty() {
                return Err(CorpusError::EmptyPoolList(name));
            }
            let mut seen = HashSet::new();
            for entry in list {
                if !seen.insert(entry.as_str()) {
                    return Err(CorpusError::DuplicatePoolEntry { list: name, entry: entry.clone() });
                }
            }
        }
        Ok(())
    }
}

fn pick<'a, R: Rng>(rng: &mut R, list: &'a [String]) -> &'a str {
    &list[rng.random_range(0..list.len() as u32) as usize]
}

/// Generates `count` synthetic profiles from `pool`.
///
/// Every field is drawn uniformly with a ChaCha8 generator seeded from `seed`,
/// so the output is identical across runs and platforms. Skillsets hold 3 to 8
/// distinct pool skills (capped by the pool size), experience is an integer
/// number of years in 0..=20, and emails carry the profile ordinal so they are
/// unique.
pub fn generate_synthetic(pool: &SkillPool, count: usize, seed: u64) -> Result<Vec<Profile>, CorpusError> {
    if count == 0 {
        return Err(CorpusError::ZeroCount);
    }
    pool.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_skills = pool.skills.len().min(8);
    let min_skills = pool.skills.len().min(3);

    let mut profiles = Vec::with_capacity(count);
    for i in 0..count {
        let first = FIRST_NAMES[rng.random_range(0..FIRST_NAMES.len() as u32) as usize];
        let last = LAST_NAMES[rng.random_range(0..LAST_NAMES.len() as u32) as usize];
        let profession = pick(&mut rng, &pool.professions).to_string();
        let experience = rng.random_range(0..=20u32) as f64;
        let interest = pick(&mut rng, &pool.interests).to_string();
        let collaboration_with = pick(&mut rng, &pool.collaboration_kinds).to_string();
        let domain = pick(&mut rng, &pool.domains).to_string();
        let n_skills = rng.random_range(min_skills as u32..=max_skills as u32) as usize;
        let skills: Vec<&str> =
            index::sample(&mut rng, pool.skills.len(), n_skills).into_iter().map(|k| pool.skills[k].as_str()).collect();

        profiles.push(Profile {
            id: ProfileId(format!("s{:04}", i + 1)),
            name: format!("{first} {last}"),
            email: format!("{}.{}.{:04}@example.edu", first.to_lowercase(), last.to_lowercase(), i + 1),
            profession,
            experience,
            interest,
            collaboration_with,
            domain,
            skillset: skills.join(", "),
            is_synthetic: true,
        });
    }
    Ok(profiles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_pool_is_valid() {
        SkillPool::builtin().validate().unwrap();
    }

    #[test]
    fn zero_count_rejected() {
        assert!(matches!(generate_synthetic(&SkillPool::builtin(), 0, 1), Err(CorpusError::ZeroCount)));
    }

    #[test]
    fn empty_pool_list_rejected() {
        let mut pool = SkillPool::builtin();
        pool.interests.clear();
        assert!(matches!(generate_synthetic(&pool, 3, 1), Err(CorpusError::EmptyPoolList("interests"))));
    }

    #[test]
    fn duplicate_pool_entry_rejected() {
        let mut pool = SkillPool::builtin();
        pool.skills.push("Python".into());
        assert!(matches!(pool.validate(), Err(CorpusError::DuplicatePoolEntry { list: "skills", .. })));
    }

    #[test]
    fn same_seed_same_profiles() {
        let pool = SkillPool::builtin();
        let a = generate_synthetic(&pool, 5, 42).unwrap();
        let b = generate_synthetic(&pool, 5, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&pool, 5, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn thousand_profiles_have_distinct_emails() {
        let pool = SkillPool::builtin();
        let profiles = generate_synthetic(&pool, 1000, 7).unwrap();
        assert_eq!(profiles.len(), 1000);
        let emails: HashSet<&str> = profiles.iter().map(|p| p.email.as_str()).collect();
        assert_eq!(emails.len(), 1000);
    }

    #[test]
    fn fields_come_from_pool() {
        let pool = SkillPool::builtin();
        for p in generate_synthetic(&pool, 200, 3).unwrap() {
            p.validate().unwrap();
            assert!(p.is_synthetic);
            assert!(pool.domains.contains(&p.domain));
            assert!(pool.professions.contains(&p.profession));
            let skills: Vec<&str> = p.skillset.split(", ").collect();
            assert!((3..=8).contains(&skills.len()), "{}", p.skillset);
            let distinct: HashSet<&str> = skills.iter().copied().collect();
            assert_eq!(distinct.len(), skills.len());
            assert!(skills.iter().all(|s| pool.skills.iter().any(|k| k == s)));
            assert!(p.experience >= 0.0 && p.experience <= 20.0 && p.experience.fract() == 0.0);
        }
    }
}
