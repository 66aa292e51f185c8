pub mod ensemble;
pub mod evaluate;
pub mod predict;
pub mod train;

use std::path::{Path, PathBuf};

/// Manifest path for a command whose primary output is a single file:
/// the same name with `.manifest.json` appended.
pub fn sibling_manifest(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", out.display()))
}
