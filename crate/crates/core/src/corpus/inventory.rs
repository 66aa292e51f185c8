//! The fixed inventory of GIF reaction categories.

use std::collections::HashMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Number of categories a production inventory file must define.
pub const INVENTORY_SIZE: usize = 43;

/// Ordered category names; the line number (from zero) is the category
/// index used everywhere else, so the file order is load-bearing.
#[derive(Debug, Clone)]
pub struct CategoryInventory {
    names: Vec<String>,
    index: HashMap<String, usize>,
    hash: [u8; 32],
}

impl CategoryInventory {
    /// Load from a file with exactly [`INVENTORY_SIZE`] non-empty lines.
    pub fn load(path: impl AsRef<Path>) -> Result<CategoryInventory> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let names: Vec<String> = text
            .lines()
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect();
        if names.len() != INVENTORY_SIZE {
            return Err(Error::Data(format!(
                "category inventory {} has {} entries, expected {}",
                path.display(),
                names.len(),
                INVENTORY_SIZE
            )));
        }
        Self::from_names(names)
    }

    /// Build from an in-memory list (any non-zero length, for tests and
    /// synthetic corpora). Names must be unique and non-empty.
    pub fn from_names(names: Vec<String>) -> Result<CategoryInventory> {
        if names.is_empty() {
            return Err(Error::Data("category inventory is empty".into()));
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Data(format!("category {i} has an empty name")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Data(format!("duplicate category name {name:?}")));
            }
        }
        let mut hasher = Sha256::new();
        hasher.update(names.join("\n").as_bytes());
        let hash = hasher.finalize().into();
        Ok(CategoryInventory { names, index, hash })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// SHA-256 over the newline-joined names; identifies the inventory in
    /// checkpoints independently of file formatting.
    pub fn hash(&self) -> &[u8; 32] {
        &self.hash
    }

    pub fn hash_hex(&self) -> String {
        self.hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}
