//! On-disk response cache.
//!
//! One file per request digest. The key covers everything that changes the
//! sampled reply: prompt text, model identifier, and temperature. A hit
//! replays the stored raw response byte-for-byte with no network traffic.

use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::BackendError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub model: String,
    pub temperature: Option<f64>,
    pub prompt: String,
    pub raw_response: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
    pub created_unix: u64,
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, BackendError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)
            .map_err(|e| BackendError::Cache(format!("cannot create {}: {e}", dir.display())))?;
        Ok(ResponseCache { dir })
    }

    /// Collision-resistant digest of (prompt, model, temperature).
    pub fn key(prompt: &str, model: &str, temperature: Option<f64>) -> String {
        let mut hasher = Sha256::new();
        hasher.update(model.as_bytes());
        hasher.update([0]);
        match temperature {
            Some(t) => hasher.update(format!("{t:?}").as_bytes()),
            None => hasher.update(b"default"),
        }
        hasher.update([0]);
        hasher.update(prompt.as_bytes());
        hex::encode(hasher.finalize())
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let bytes = fs::read(self.path_for(key)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    /// Atomic write: temp file in the same directory, then rename.
    pub fn put(&self, key: &str, entry: &CacheEntry) -> Result<(), BackendError> {
        let body = serde_json::to_vec_pretty(entry)
            .map_err(|e| BackendError::Cache(format!("serialize: {e}")))?;
        let tmp = self.dir.join(format!(".{key}.tmp"));
        let path = self.path_for(key);
        fs::write(&tmp, body)
            .and_then(|()| fs::rename(&tmp, &path))
            .map_err(|e| BackendError::Cache(format!("write {}: {e}", path.display())))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_separates_prompt_model_and_temperature() {
        let k0 = ResponseCache::key("p", "m", None);
        assert_ne!(k0, ResponseCache::key("p2", "m", None));
        assert_ne!(k0, ResponseCache::key("p", "m2", None));
        assert_ne!(k0, ResponseCache::key("p", "m", Some(0.7)));
        assert_eq!(k0, ResponseCache::key("p", "m", None));
    }

    #[test]
    fn round_trip_preserves_raw_response() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let entry = CacheEntry {
            model: "m".into(),
            temperature: Some(0.2),
            prompt: "hello".into(),
            raw_response: "Reasoning: x\nResponse: No".into(),
            prompt_tokens: Some(12),
            completion_tokens: Some(8),
            created_unix: 0,
        };
        let key = ResponseCache::key(&entry.prompt, &entry.model, entry.temperature);
        assert!(cache.get(&key).is_none());
        cache.put(&key, &entry).unwrap();
        let back = cache.get(&key).unwrap();
        assert_eq!(back.raw_response, entry.raw_response);
    }
}
