use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Profile, ProfileError, ProfileId};

/// A rejected input record, with its 0-based position in the source.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecordError {
    #[error("record {record}: missing field `{field}`")]
    MissingField { record: usize, field: &'static str },
    #[error("record {record}: experience `{value}` is not a number")]
    BadExperience { record: usize, value: String },
    #[error("record {record}: experience {value} is negative")]
    NegativeExperience { record: usize, value: f64 },
    #[error("record {record}: field `{field}` is empty")]
    EmptyField { record: usize, field: &'static str },
    #[error("record {record}: duplicate email `{email}` (first seen in record {first})")]
    DuplicateEmail { record: usize, email: String, first: usize },
    #[error("record {record}: duplicate id `{id}`")]
    DuplicateId { record: usize, id: String },
    #[error("record {record}: {message}")]
    Malformed { record: usize, message: String },
}

impl RecordError {
    pub fn record(&self) -> usize {
        match self {
            RecordError::MissingField { record, .. }
            | RecordError::BadExperience { record, .. }
            | RecordError::NegativeExperience { record, .. }
            | RecordError::EmptyField { record, .. }
            | RecordError::DuplicateEmail { record, .. }
            | RecordError::DuplicateId { record, .. }
            | RecordError::Malformed { record, .. } => *record,
        }
    }
}

/// Raw record as found in the file; every field optional so that missing
/// columns can be reported by name.
#[derive(Debug, Default, Deserialize)]
struct RawRecord {
    id: Option<String>,
    name: Option<String>,
    email: Option<String>,
    profession: Option<String>,
    experience: Option<serde_json::Value>,
    interest: Option<String>,
    collaboration_with: Option<String>,
    domain: Option<String>,
    skillset: Option<String>,
    is_synthetic: Option<serde_json::Value>,
}

fn required(record: usize, field: &'static str, value: Option<String>) -> Result<String, RecordError> {
    value.ok_or(RecordError::MissingField { record, field })
}

fn parse_experience(record: usize, value: Option<serde_json::Value>) -> Result<f64, RecordError> {
    let value = value.ok_or(RecordError::MissingField { record, field: "experience" })?;
    let parsed = match &value {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) if s.trim().is_empty() => {
            return Err(RecordError::MissingField { record, field: "experience" })
        }
        serde_json::Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    };
    match parsed {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(RecordError::BadExperience { record, value: value.to_string() }),
    }
}

fn parse_flag(value: Option<serde_json::Value>) -> bool {
    match value {
        Some(serde_json::Value::Bool(b)) => b,
        Some(serde_json::Value::String(s)) => matches!(s.trim().to_ascii_lowercase().as_str(), "true" | "1" | "yes"),
        Some(serde_json::Value::Number(n)) => n.as_f64().is_some_and(|v| v != 0.0),
        _ => false,
    }
}

fn convert(record: usize, raw: RawRecord) -> Result<Profile, RecordError> {
    let profile = Profile {
        id: ProfileId(
            raw.id
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().to_string())
                .unwrap_or_else(|| format!("p{:04}", record + 1)),
        ),
        name: required(record, "name", raw.name)?,
        email: required(record, "email", raw.email)?.trim().to_string(),
        profession: required(record, "profession", raw.profession)?,
        experience: parse_experience(record, raw.experience)?,
        interest: required(record, "interest", raw.interest)?,
        collaboration_with: required(record, "collaboration_with", raw.collaboration_with)?,
        domain: required(record, "domain", raw.domain)?,
        skillset: required(record, "skillset", raw.skillset)?,
        is_synthetic: parse_flag(raw.is_synthetic),
    };
    profile.validate().map_err(|e| match e {
        ProfileError::EmptyField(field) => RecordError::EmptyField { record, field },
        ProfileError::NegativeExperience(value) => RecordError::NegativeExperience { record, value },
    })?;
    Ok(profile)
}

/// Validates raw records and enforces corpus-wide uniqueness of email and id.
fn collect(records: impl IntoIterator<Item = Result<RawRecord, RecordError>>) -> Result<Vec<Profile>, CorpusError> {
    let mut profiles = Vec::new();
    let mut errors = Vec::new();
    let mut emails: HashMap<String, usize> = HashMap::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    for (index, raw) in records.into_iter().enumerate() {
        let profile = match raw.and_then(|raw| convert(index, raw)) {
            Ok(p) => p,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        let key = profile.email.to_lowercase();
        if let Some(&first) = emails.get(&key) {
            errors.push(RecordError::DuplicateEmail { record: index, email: profile.email.clone(), first });
            continue;
        }
        if ids.contains_key(profile.id.as_str()) {
            errors.push(RecordError::DuplicateId { record: index, id: profile.id.0.clone() });
            continue;
        }
        emails.insert(key, index);
        ids.insert(profile.id.0.clone(), index);
        profiles.push(profile);
    }
    if errors.is_empty() {
        Ok(profiles)
    } else {
        Err(CorpusError::InvalidRecords(errors))
    }
}

/// Reads profiles from CSV with a header row.
pub fn load_profiles_csv<R: Read>(reader: R) -> Result<Vec<Profile>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::Headers).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut records = Vec::new();
    for (index, row) in rdr.records().enumerate() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                records.push(Err(RecordError::Malformed { record: index, message: e.to_string() }));
                continue;
            }
        };
        let mut map = serde_json::Map::new();
        for (name, value) in headers.iter().zip(row.iter()) {
            map.insert(name.to_string(), serde_json::Value::String(value.to_string()));
        }
        records.push(
            serde_json::from_value::<RawRecord>(serde_json::Value::Object(map))
                .map_err(|e| RecordError::Malformed { record: index, message: e.to_string() }),
        );
    }
    collect(records)
}

/// Reads profiles from JSON-lines, one object per line. Blank lines are skipped
/// and do not count as records.
pub fn load_profiles_jsonl<R: Read>(reader: R) -> Result<Vec<Profile>, CorpusError> {
    let mut records = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let index = records.len();
        records.push(
            serde_json::from_str::<RawRecord>(&line)
                .map_err(|e| RecordError::Malformed { record: index, message: e.to_string() }),
        );
    }
    collect(records)
}

/// Loads a `.csv` or `.jsonl`/`.json` profile file.
pub fn load_profiles(path: &Path) -> Result<Vec<Profile>, CorpusError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let file = File::open(path)?;
    match ext.as_str() {
        "csv" => load_profiles_csv(file),
        "jsonl" | "json" | "ndjson" => load_profiles_jsonl(file),
        other => Err(CorpusError::UnsupportedFormat(other.to_string())),
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    name: &'a str,
    email: &'a str,
    profession: &'a str,
    experience: f64,
    interest: &'a str,
    collaboration_with: &'a str,
    domain: &'a str,
    skillset: &'a str,
    is_synthetic: bool,
}

/// Writes profiles as CSV, including the `id` and `is_synthetic` columns.
pub fn write_profiles_csv<W: Write>(writer: W, profiles: &[Profile]) -> Result<(), CorpusError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in profiles {
        wtr.serialize(CsvRow {
            id: p.id.as_str(),
            name: &p.name,
            email: &p.email,
            profession: &p.profession,
            experience: p.experience,
            interest: &p.interest,
            collaboration_with: &p.collaboration_with,
            domain: &p.domain,
            skillset: &p.skillset,
            is_synthetic: p.is_synthetic,
        })?;
    }
    wtr.flush()?;
    Ok(())
}
