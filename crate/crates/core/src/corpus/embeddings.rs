//! Pretrained word-vector files: `word v1 v2 ... vd`, space separated.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Load vectors of width `dim`. Later entries for the same word replace
/// earlier ones. Values are parsed directly at the target precision so a
/// 32-bit run rounds each literal exactly once.
pub fn load_embeddings<S: Scalar>(
    path: impl AsRef<Path>,
    dim: usize,
) -> Result<HashMap<String, Vec<S>>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-empty line has a first field");
        let values: Vec<S> = parts
            .map(|v| {
                S::parse_str(v).ok_or_else(|| {
                    Error::parse(path, i + 1, format!("bad float literal {v:?}"))
                })
            })
            .collect::<Result<_>>()?;
        if values.len() != dim {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected {dim} values, got {}", values.len()),
            ));
        }
        out.insert(word.to_string(), values);
    }
    Ok(out)
}
