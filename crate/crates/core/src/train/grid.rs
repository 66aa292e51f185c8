//! Hyperparameter grid definitions.
//!
//! A grid file is JSON lines, one candidate per line. Each candidate gets
//! its own training seed derived from the base seed, the architecture and
//! its position in the file, so adding a line never changes the runs of
//! the lines before it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arch::ArchId;
use crate::error::{Error, Result};
use crate::nn::rng::derive_seed;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub rnn_units: usize,
    pub dense_units: usize,
    pub lr: f64,
}

pub fn load_grid(path: &Path) -> Result<Vec<GridPoint>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let point: GridPoint = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        if point.rnn_units == 0 || point.dense_units == 0 {
            return Err(Error::parse(path, lineno + 1, "units must be positive"));
        }
        if !(point.lr.is_finite() && point.lr > 0.0) {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("learning rate {} is invalid", point.lr),
            ));
        }
        points.push(point);
    }
    if points.is_empty() {
        return Err(Error::Data(format!(
            "{}: grid file defines no candidates",
            path.display()
        )));
    }
    Ok(points)
}

/// Seed for the `index`-th grid candidate of one architecture.
pub fn grid_seed(base: u64, arch: ArchId, index: usize) -> u64 {
    derive_seed(base, &format!("grid.{arch}.{index}"))
}

/// Index of the best validation recall, earliest on ties.
pub fn best_index(recalls: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &r) in recalls.iter().enumerate() {
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((i, r));
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_grid(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_candidates_in_order() {
        let f = write_grid(
            "{\"rnn_units\":128,\"dense_units\":100,\"lr\":0.001}\n\
             \n\
             {\"rnn_units\":64,\"dense_units\":50,\"lr\":0.01}\n",
        );
        let grid = load_grid(f.path()).unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid[0].rnn_units, 128);
        assert_eq!(grid[1].lr, 0.01);
    }

    #[test]
    fn bad_lines_are_reported_with_their_number() {
        let f = write_grid("{\"rnn_units\":128,\"dense_units\":100,\"lr\":0.001}\nnot json\n");
        let err = load_grid(f.path()).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");

        let f = write_grid("{\"rnn_units\":0,\"dense_units\":100,\"lr\":0.001}\n");
        let err = load_grid(f.path()).unwrap_err().to_string();
        assert!(err.contains("positive"), "{err}");

        let f = write_grid("{\"rnn_units\":1,\"dense_units\":1,\"lr\":0.0}\n");
        assert!(load_grid(f.path()).is_err());

        let f = write_grid("{\"rnn_units\":1,\"dense_units\":1,\"lr\":0.1,\"extra\":1}\n");
        assert!(load_grid(f.path()).is_err());
    }

    #[test]
    fn empty_grid_is_an_error() {
        let f = write_grid("\n\n");
        assert!(load_grid(f.path()).is_err());
    }

    #[test]
    fn seeds_differ_per_arch_and_index() {
        let mut seen = std::collections::HashSet::new();
        for arch in ArchId::ALL {
            for i in 0..4 {
                assert!(seen.insert(grid_seed(7, arch, i)));
                assert_eq!(grid_seed(7, arch, i), grid_seed(7, arch, i));
            }
        }
    }

    #[test]
    fn best_index_prefers_earliest_tie() {
        assert_eq!(best_index(&[0.1, 0.5, 0.5, 0.3]), Some(1));
        assert_eq!(best_index(&[]), None);
        assert_eq!(best_index(&[0.2]), Some(0));
    }
}
