use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mortband::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";
pub const TIMING: &str = "timing.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub raw_rows: Option<usize>,
    pub duplicates_removed: Option<usize>,
    pub deduped_rows: Option<usize>,
    pub class_counts_raw: Option<Vec<usize>>,
    pub class_counts: Option<Vec<usize>>,
    pub cleaned_columns: Option<usize>,
    pub encoded_inputs: Option<usize>,
    pub train_rows: Option<usize>,
    pub test_rows: Option<usize>,
    pub train_class_counts: Option<Vec<usize>>,
    pub test_class_counts: Option<Vec<usize>>,
    pub balanced_rows: Option<usize>,
    pub balanced_class_counts: Option<Vec<usize>>,
}

impl Counts {
    /// raw ≥ deduped, train + test = deduped, balanced ≤ train.
    pub fn check_chain(&self) -> Result<()> {
        let broken = |what: &str| Err(Error::Config(format!("row count chain broken: {what}")));
        if let (Some(r), Some(d)) = (self.raw_rows, self.deduped_rows) {
            if r < d {
                return broken("raw < deduped");
            }
        }
        if let (Some(d), Some(tr), Some(te)) = (self.deduped_rows, self.train_rows, self.test_rows) {
            if tr + te != d {
                return broken("train + test != deduped");
            }
        }
        if let (Some(tr), Some(b)) = (self.train_rows, self.balanced_rows) {
            if b > tr {
                return broken("balanced > train");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: Option<Value>,
    pub stages: Vec<String>,
    pub counts: Counts,
    /// Output path (relative to the run directory) → SHA-256.
    pub artifacts: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// The run directory with its manifest, loaded from disk when present.
pub struct Run {
    pub dir: PathBuf,
    pub manifest: Manifest,
    timing: BTreeMap<String, f64>,
}

impl Run {
    pub fn open(dir: &Path) -> Result<Self> {
        for sub in ["data", "models", "reports"] {
            let p = dir.join(sub);
            fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
        }
        let read_json = |name: &str| -> Result<Option<String>> {
            let p = dir.join(name);
            match fs::read_to_string(&p) {
                Ok(s) => Ok(Some(s)),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                Err(e) => Err(Error::io(&p, e)),
            }
        };
        let manifest = match read_json(MANIFEST)? {
            Some(s) => serde_json::from_str(&s)?,
            None => Manifest::default(),
        };
        let timing = match read_json(TIMING)? {
            Some(s) => serde_json::from_str(&s)?,
            None => BTreeMap::new(),
        };
        Ok(Run {
            dir: dir.to_owned(),
            manifest,
            timing,
        })
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    /// Writes a file under the run directory and records its hash.
    pub fn write(&mut self, rel: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let p = self.path(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&p, contents.as_ref()).map_err(|e| Error::io(&p, e))?;
        self.record(rel)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(rel, s)
    }

    /// Records the hash of a file written by other means.
    pub fn record(&mut self, rel: &str) -> Result<()> {
        let h = sha256_file(&self.path(rel))?;
        self.manifest.artifacts.insert(rel.to_owned(), h);
        Ok(())
    }

    pub fn finish_stage(&mut self, stage: &str, seconds: f64) -> Result<()> {
        if !self.manifest.stages.iter().any(|s| s == stage) {
            self.manifest.stages.push(stage.to_owned());
        }
        self.timing.insert(stage.to_owned(), seconds);
        self.manifest.counts.check_chain()?;
        let mut m = serde_json::to_string_pretty(&self.manifest)?;
        m.push('\n');
        let p = self.path(MANIFEST);
        fs::write(&p, m).map_err(|e| Error::io(&p, e))?;
        let mut t = serde_json::to_string_pretty(&self.timing)?;
        t.push('\n');
        let p = self.path(TIMING);
        fs::write(&p, t).map_err(|e| Error::io(&p, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_violations() {
        let mut c = Counts {
            raw_rows: Some(10),
            deduped_rows: Some(9),
            train_rows: Some(6),
            test_rows: Some(3),
            balanced_rows: Some(6),
            ..Counts::default()
        };
        assert!(c.check_chain().is_ok());
        c.balanced_rows = Some(7);
        assert!(c.check_chain().is_err());
        c.balanced_rows = None;
        c.test_rows = Some(4);
        assert!(c.check_chain().is_err());
    }
}
