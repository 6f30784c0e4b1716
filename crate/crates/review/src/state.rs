//! Reviewer verdicts and their on-disk state file.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, ReviewError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Mislabeled,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub sentence_id: u64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewer_note: Option<String>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl ReviewRecord {
    /// Checks the record against a sentence of `n` tokens over `k` classes.
    pub fn validate(&self, n: usize, k: usize) -> Result<()> {
        if let Some(labels) = &self.corrected_labels {
            if labels.len() != n {
                return Err(ReviewError::Validation(format!(
                    "corrected_labels has {} entries, sentence has {n} tokens",
                    labels.len()
                )));
            }
            if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
                return Err(ReviewError::Validation(format!(
                    "class index {bad} out of range 0..{k}"
                )));
            }
        }
        let has_note = self
            .reviewer_note
            .as_deref()
            .is_some_and(|s| !s.trim().is_empty());
        if self.verdict == Verdict::Mislabeled && self.corrected_labels.is_none() && !has_note {
            return Err(ReviewError::Validation(
                "a mislabeled verdict needs corrected_labels or a reviewer_note".into(),
            ));
        }
        Ok(())
    }
}

pub fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// SHA-256 of the canonical dataset file, hex encoded.
pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewState {
    pub fingerprint: String,
    /// Latest record per sentence.
    pub records: BTreeMap<u64, ReviewRecord>,
}

impl ReviewState {
    pub fn new(fingerprint: impl Into<String>) -> Self {
        ReviewState {
            fingerprint: fingerprint.into(),
            records: BTreeMap::new(),
        }
    }

    /// Loads the state at `path`, or starts empty when the file does not exist.
    pub fn load(path: &Path, fingerprint: &str) -> Result<Self> {
        let bytes = match std::fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Ok(Self::new(fingerprint))
            }
            Err(source) => {
                return Err(ReviewError::Io {
                    path: path.to_path_buf(),
                    source,
                })
            }
        };
        let state: ReviewState =
            serde_json::from_slice(&bytes).map_err(|e| ReviewError::CorruptState {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        if state.fingerprint != fingerprint {
            return Err(ReviewError::ForeignState {
                path: path.to_path_buf(),
                found: state.fingerprint,
                expected: fingerprint.to_string(),
            });
        }
        if let Some((k, r)) = state.records.iter().find(|(k, r)| **k != r.sentence_id) {
            return Err(ReviewError::CorruptState {
                path: path.to_path_buf(),
                message: format!("record under key {k} is for sentence {}", r.sentence_id),
            });
        }
        Ok(state)
    }

    /// Writes to a temporary file in the same directory, syncs it and renames
    /// it over `path`, so readers see either the old or the new state.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |source| ReviewError::Io {
            path: path.to_path_buf(),
            source,
        };
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        serde_json::to_writer_pretty(&mut tmp, self).map_err(|e| io(e.into()))?;
        tmp.write_all(b"\n").map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }
}
