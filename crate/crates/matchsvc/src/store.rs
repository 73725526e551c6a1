//! Document stores: JSON documents addressed by collection and key.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use parking_lot::RwLock;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("invalid collection name `{0}`")]
    BadCollection(String),
    #[error("io error at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt document {path}: {source}")]
    Corrupt { path: PathBuf, source: serde_json::Error },
}

/// Keyed JSON documents grouped into collections. `scan` returns documents in
/// ascending key order.
pub trait DocumentStore: Send + Sync {
    fn get(&self, collection: &str, key: &str) -> Result<Option<Value>, StoreError>;
    fn put(&self, collection: &str, key: &str, doc: &Value) -> Result<(), StoreError>;
    /// Returns whether a document was removed.
    fn delete(&self, collection: &str, key: &str) -> Result<bool, StoreError>;
    fn scan(&self, collection: &str) -> Result<Vec<(String, Value)>, StoreError>;
    fn collections(&self) -> Result<Vec<String>, StoreError>;
}

fn check_collection(name: &str) -> Result<(), StoreError> {
    let ok = !name.is_empty() && name.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_');
    if ok {
        Ok(())
    } else {
        Err(StoreError::BadCollection(name.to_string()))
    }
}

/// Everything in every collection, for whole-store comparisons.
pub fn dump(store: &dyn DocumentStore) -> Result<BTreeMap<String, Vec<(String, Value)>>, StoreError> {
    let mut out = BTreeMap::new();
    for c in store.collections()? {
        out.insert(c.clone(), store.scan(&c)?);
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    data: RwLock<BTreeMap<String, BTreeMap<String, Value>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl DocumentStore for MemoryStore {
    fn get(&self, collection: &str, key: &str) -> Result<Option<Value>, StoreError> {
        check_collection(collection)?;
        Ok(self.data.read().get(collection).and_then(|c| c.get(key)).cloned())
    }

    fn put(&self, collection: &str, key: &str, doc: &Value) -> Result<(), StoreError> {
        check_collection(collection)?;
        self.data.write().entry(collection.to_string()).or_default().insert(key.to_string(), doc.clone());
        Ok(())
    }

    fn delete(&self, collection: &str, key: &str) -> Result<bool, StoreError> {
        check_collection(collection)?;
        Ok(self.data.write().get_mut(collection).and_then(|c| c.remove(key)).is_some())
    }

    fn scan(&self, collection: &str) -> Result<Vec<(String, Value)>, StoreError> {
        check_collection(collection)?;
        Ok(self
            .data
            .read()
            .get(collection)
            .map(|c| c.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
            .unwrap_or_default())
    }

    fn collections(&self) -> Result<Vec<String>, StoreError> {
        Ok(self.data.read().iter().filter(|(_, c)| !c.is_empty()).map(|(k, _)| k.clone()).collect())
    }
}

/// One directory per collection, one `<key>.json` file per document. Writes
/// go to a temporary file that is synced and then renamed over the target.
#[derive(Debug)]
pub struct FileStore {
    root: PathBuf,
    sync: bool,
}

const TMP_SUFFIX: &str = ".tmp";

impl FileStore {
    /// Opens `root`, creating it when missing.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|source| StoreError::Io { path: root.clone(), source })?;
        Ok(Self { root, sync: true })
    }

    /// Skips fsync on writes. Renames stay atomic, durability across power
    /// loss is lost.
    pub fn without_sync(mut self) -> Self {
        self.sync = false;
        self
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn doc_path(&self, collection: &str, key: &str) -> PathBuf {
        self.root.join(collection).join(format!("{}.json", encode_key(key)))
    }
}

/// Percent-encodes every byte outside `[A-Za-z0-9_.-]` (and a leading dot).
fn encode_key(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    for (i, b) in key.bytes().enumerate() {
        let plain = b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || (b == b'.' && i > 0);
        if plain {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn decode_key(name: &str) -> Option<String> {
    let bytes = name.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = name.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

impl DocumentStore for FileStore {
    fn get(&self, collection: &str, key: &str) -> Result<Option<Value>, StoreError> {
        check_collection(collection)?;
        let path = self.doc_path(collection, key);
        match fs::read(&path) {
            Ok(bytes) => {
                serde_json::from_slice(&bytes).map(Some).map_err(|source| StoreError::Corrupt { path, source })
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(source) => Err(StoreError::Io { path, source }),
        }
    }

    fn put(&self, collection: &str, key: &str, doc: &Value) -> Result<(), StoreError> {
        check_collection(collection)?;
        let dir = self.root.join(collection);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let path = self.doc_path(collection, key);
        let tmp = path.with_extension(format!("json{TMP_SUFFIX}"));
        let mut bytes = serde_json::to_vec_pretty(doc).expect("json values serialize");
        bytes.push(b'\n');
        {
            let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
            f.write_all(&bytes).map_err(io_err(&tmp))?;
            if self.sync {
                f.sync_all().map_err(io_err(&tmp))?;
            }
        }
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }

    fn delete(&self, collection: &str, key: &str) -> Result<bool, StoreError> {
        check_collection(collection)?;
        let path = self.doc_path(collection, key);
        match fs::remove_file(&path) {
            Ok(()) => Ok(true),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(false),
            Err(source) => Err(StoreError::Io { path, source }),
        }
    }

    fn scan(&self, collection: &str) -> Result<Vec<(String, Value)>, StoreError> {
        check_collection(collection)?;
        let dir = self.root.join(collection);
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(source) => return Err(StoreError::Io { path: dir, source }),
        };
        let mut out = Vec::new();
        for entry in entries {
            let entry = entry.map_err(io_err(&dir))?;
            let name = entry.file_name();
            let Some(stem) = name.to_str().and_then(|n| n.strip_suffix(".json")) else {
                continue;
            };
            let Some(key) = decode_key(stem) else { continue };
            let path = entry.path();
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            let doc = serde_json::from_slice(&bytes).map_err(|source| StoreError::Corrupt { path, source })?;
            out.push((key, doc));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    fn collections(&self) -> Result<Vec<String>, StoreError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.root).map_err(io_err(&self.root))? {
            let entry = entry.map_err(io_err(&self.root))?;
            if let Some(name) = entry.file_name().to_str() {
                if entry.path().is_dir() && check_collection(name).is_ok() && !self.scan(name)?.is_empty() {
                    out.push(name.to_string());
                }
            }
        }
        out.sort();
        Ok(out)
    }
}
