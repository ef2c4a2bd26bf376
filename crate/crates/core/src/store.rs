//! Append-only record of evaluated zero-divisor products, one JSON object per
//! line.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreRecord {
    pub space: String,
    pub s: usize,
    pub spec: String,
    pub nonzero: bool,
    pub degree: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl StoreRecord {
    pub fn now(space: String, s: usize, spec: String, nonzero: bool, degree: u64) -> StoreRecord {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        StoreRecord { space, s, spec, nonzero, degree, timestamp }
    }
}

/// Writes go through a mutex; reads parse whatever is on disk at that moment.
#[derive(Debug)]
pub struct ResultStore {
    path: PathBuf,
    writer: Mutex<()>,
}

impl ResultStore {
    pub fn open(path: impl AsRef<Path>) -> Result<ResultStore> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(ResultStore { path, writer: Mutex::new(()) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &StoreRecord) -> Result<()> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut file = OpenOptions::new().append(true).open(&self.path)?;
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        Ok(())
    }

    /// All records; lines that fail to parse (e.g. a torn final write) are skipped.
    pub fn records(&self) -> Result<Vec<StoreRecord>> {
        let file = File::open(&self.path)?;
        let mut out = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line?;
            if let Ok(r) = serde_json::from_str(&line) {
                out.push(r);
            }
        }
        Ok(out)
    }

    /// Most recent verdict for a product, if one was stored.
    pub fn lookup(&self, space: &str, s: usize, spec: &str) -> Result<Option<bool>> {
        Ok(self.records()?.into_iter().rev().find(|r| r.space == space && r.s == s && r.spec == spec).map(|r| r.nonzero))
    }

    /// Nonzero products recorded for `space` in tensor powers up to `s`.
    pub fn witnesses(&self, space: &str, max_s: usize) -> Result<Vec<StoreRecord>> {
        Ok(self.records()?.into_iter().filter(|r| r.space == space && r.s <= max_s && r.nonzero).collect())
    }
}
