//! Prediction files: one JSON object per line with the instance id, the
//! recommended categories (exactly six, all distinct, best first) and a
//! score per category.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of categories every prediction must recommend.
pub const N_RECOMMENDED: usize = 6;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Prediction {
    pub idx: u64,
    pub categories: Vec<String>,
    pub scores: Vec<f64>,
}

impl Prediction {
    fn validate(&self, context: &str) -> Result<()> {
        if self.categories.len() != N_RECOMMENDED {
            return Err(Error::Data(format!(
                "{context}: idx {} has {} categories, expected {N_RECOMMENDED}",
                self.idx,
                self.categories.len()
            )));
        }
        let distinct: HashSet<&str> = self.categories.iter().map(String::as_str).collect();
        if distinct.len() != N_RECOMMENDED {
            return Err(Error::Data(format!(
                "{context}: idx {} repeats a category",
                self.idx
            )));
        }
        if self.scores.len() != N_RECOMMENDED {
            return Err(Error::Data(format!(
                "{context}: idx {} has {} scores, expected {N_RECOMMENDED}",
                self.idx,
                self.scores.len()
            )));
        }
        Ok(())
    }
}

/// Validate every record, then write the file. Validation happens first so
/// a bad batch never leaves a truncated or misleading artifact behind.
pub fn write_predictions(path: impl AsRef<Path>, preds: &[Prediction]) -> Result<()> {
    let path = path.as_ref();
    let context = path.display().to_string();
    let mut body = Vec::new();
    for p in preds {
        p.validate(&context)?;
        serde_json::to_writer(&mut body, p).expect("prediction serializes");
        body.push(b'\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&body).map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let context = path.display().to_string();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let p: Prediction = serde_json::from_str(raw)
            .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        p.validate(&context)?;
        if !seen.insert(p.idx) {
            return Err(Error::parse(path, i + 1, format!("duplicate idx {}", p.idx)));
        }
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(idx: u64, names: &[&str]) -> Prediction {
        Prediction {
            idx,
            categories: names.iter().map(|s| s.to_string()).collect(),
            scores: (0..names.len()).map(|i| 1.0 - i as f64 * 0.1).collect(),
        }
    }

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("preds.jsonl");
        let preds = vec![pred(1, &["a", "b", "c", "d", "e", "f"])];
        write_predictions(&p, &preds).unwrap();
        assert_eq!(read_predictions(&p).unwrap(), preds);
    }

    #[test]
    fn invalid_batch_creates_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("preds.jsonl");
        let bad = vec![
            pred(1, &["a", "b", "c", "d", "e", "f"]),
            pred(2, &["a", "b", "c", "d", "e"]),
        ];
        assert!(write_predictions(&p, &bad).is_err());
        assert!(!p.exists(), "file must not be created for an invalid batch");
    }

    #[test]
    fn repeated_category_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("preds.jsonl");
        let bad = vec![pred(1, &["a", "a", "c", "d", "e", "f"])];
        assert!(write_predictions(&p, &bad).is_err());
    }

    #[test]
    fn duplicate_idx_rejected_on_read() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("preds.jsonl");
        let line = serde_json::to_string(&pred(7, &["a", "b", "c", "d", "e", "f"])).unwrap();
        std::fs::write(&p, format!("{line}\n{line}\n")).unwrap();
        let err = read_predictions(&p).unwrap_err().to_string();
        assert!(err.contains("duplicate idx 7"), "{err}");
    }
}
