use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CACHE_DIR_ENV: &str = "BIASEVAL_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry {
    hyp: String,
    #[serde(rename = "ref")]
    reference: String,
    score: f64,
}

/// Scores keyed by (metric, hyp, ref). Entries are write-once; a
/// disk-backed cache appends one JSON line per new entry to
/// `<dir>/<metric>.jsonl`.
#[derive(Debug, Default)]
pub struct ScoreCache {
    dir: Option<PathBuf>,
    entries: Mutex<HashMap<(String, String, String), f64>>,
}

fn file_name(metric: &str) -> String {
    let safe: String = metric
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}.jsonl")
}

impl ScoreCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads any existing entries under `dir`.
    pub fn on_disk(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut entries = HashMap::new();
        for item in std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = item.map_err(|e| Error::io(&dir, e))?.path();
            let Some(metric) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".jsonl"))
            else {
                continue;
            };
            let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| Error::io(&path, e))?;
                match serde_json::from_str::<Entry>(&line) {
                    Ok(e) => {
                        entries
                            .entry((metric.to_owned(), e.hyp, e.reference))
                            .or_insert(e.score);
                    }
                    Err(_) => log::warn!("{}: skipping unreadable cache line", path.display()),
                }
            }
        }
        Ok(ScoreCache {
            dir: Some(dir),
            entries: Mutex::new(entries),
        })
    }

    /// Disk-backed when `BIASEVAL_CACHE_DIR` is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::on_disk(PathBuf::from(dir)),
            _ => Ok(Self::in_memory()),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn get(&self, metric: &str, hyp: &str, reference: &str) -> Option<f64> {
        let key = (file_stem(metric), hyp.to_owned(), reference.to_owned());
        self.entries.lock().expect("cache lock").get(&key).copied()
    }

    /// Stores `score` unless the key is already present; returns the
    /// value now held.
    pub fn insert(&self, metric: &str, hyp: &str, reference: &str, score: f64) -> f64 {
        let key = (file_stem(metric), hyp.to_owned(), reference.to_owned());
        let mut entries = self.entries.lock().expect("cache lock");
        if let Some(&existing) = entries.get(&key) {
            return existing;
        }
        entries.insert(key, score);
        if let Some(dir) = &self.dir {
            let path = dir.join(file_name(metric));
            let line = serde_json::to_string(&Entry {
                hyp: hyp.to_owned(),
                reference: reference.to_owned(),
                score,
            })
            .expect("cache entry serializes");
            let written = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .and_then(|mut f| writeln!(f, "{line}"));
            if let Err(e) = written {
                log::warn!("{}: cache write failed: {e}", path.display());
            }
        }
        score
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn file_stem(metric: &str) -> String {
    file_name(metric).trim_end_matches(".jsonl").to_owned()
}
