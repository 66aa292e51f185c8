//! JSON-lines datasets: one instance per line with a tweet, a reply and an
//! optional list of gold category names.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::inventory::CategoryInventory;

#[derive(Debug, Clone)]
pub struct Instance {
    pub idx: u64,
    pub text: String,
    pub reply: String,
    /// Gold category indices, sorted ascending. Empty for unlabeled rows.
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

#[derive(Deserialize)]
struct Line {
    idx: u64,
    text: String,
    reply: String,
    #[serde(default)]
    categories: Vec<String>,
}

/// Load a dataset, resolving category names against the inventory.
///
/// With `require_labels` every unlabeled instance is dropped; the number
/// dropped is returned so callers can report it. Duplicate `idx` values,
/// malformed JSON, unknown categories and repeated categories within one
/// instance are all errors naming the line.
pub fn load_dataset(
    path: impl AsRef<Path>,
    inventory: &CategoryInventory,
    require_labels: bool,
) -> Result<(Dataset, usize)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut instances = Vec::new();
    let mut seen = HashSet::new();
    let mut skipped = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if !seen.insert(line.idx) {
            return Err(Error::parse(path, lineno, format!("duplicate idx {}", line.idx)));
        }
        let mut labels = Vec::with_capacity(line.categories.len());
        for name in &line.categories {
            let idx = inventory.index_of(name).ok_or_else(|| {
                Error::parse(path, lineno, format!("unknown category {name:?}"))
            })?;
            if labels.contains(&idx) {
                return Err(Error::parse(path, lineno, format!("repeated category {name:?}")));
            }
            labels.push(idx);
        }
        labels.sort_unstable();
        if require_labels && labels.is_empty() {
            skipped += 1;
            continue;
        }
        instances.push(Instance {
            idx: line.idx,
            text: line.text,
            reply: line.reply,
            labels,
        });
    }
    Ok((Dataset { instances }, skipped))
}

/// Load only `idx -> gold category names` for metric computation, without
/// an inventory. Unlabeled rows are kept (the caller decides whether an
/// unlabeled instance it needs is an error).
pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<(u64, BTreeSet<String>)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if !seen.insert(line.idx) {
            return Err(Error::parse(path, lineno, format!("duplicate idx {}", line.idx)));
        }
        out.push((line.idx, line.categories.into_iter().collect()));
    }
    Ok(out)
}

/// Multi-hot target vector over the inventory.
pub fn multi_hot<S: Scalar>(labels: &[usize], n_outputs: usize) -> Vec<S> {
    let mut y = vec![S::zero(); n_outputs];
    for &l in labels {
        y[l] = S::one();
    }
    y
}
