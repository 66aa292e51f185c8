//! Majority voting over member prediction sets.

use std::collections::BTreeMap;

use crate::corpus::{CategoryInventory, Prediction};
use crate::error::{Error, Result};

/// Vote over one instance. Each member contributes its recommended names
/// with their scores; the result is the `k` best labels ordered by
/// (frequency desc, mean member score desc, inventory index asc), with the
/// frequencies as output scores.
///
/// Per-label scores are summed in value order, not member order, so the
/// result is bitwise independent of member permutation.
pub fn majority_vote(
    members: &[(&[String], &[f64])],
    inventory: &CategoryInventory,
    k: usize,
) -> Result<(Vec<String>, Vec<f64>)> {
    // inventory index -> (frequency, member scores).
    let mut tally: BTreeMap<usize, (usize, Vec<f64>)> = BTreeMap::new();
    for (names, scores) in members {
        for (name, &score) in names.iter().zip(scores.iter()) {
            let idx = inventory
                .index_of(name)
                .ok_or_else(|| Error::Data(format!("unknown category {name:?} in member prediction")))?;
            let entry = tally.entry(idx).or_insert((0, Vec::new()));
            entry.0 += 1;
            entry.1.push(score);
        }
    }

    let mut ranked: Vec<(usize, usize, f64)> = tally
        .into_iter()
        .map(|(idx, (freq, mut scores))| {
            scores.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            (idx, freq, mean)
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| b.2.partial_cmp(&a.2).expect("finite means"))
            .then_with(|| a.0.cmp(&b.0))
    });
    ranked.truncate(k);

    let names = ranked
        .iter()
        .map(|&(idx, _, _)| inventory.name(idx).to_string())
        .collect();
    let freqs = ranked.iter().map(|&(_, freq, _)| freq as f64).collect();
    Ok((names, freqs))
}

/// Vote over whole member prediction files. All members must cover exactly
/// the same idx set; the output is ordered by ascending idx.
pub fn ensemble_predictions(
    members: &[Vec<Prediction>],
    inventory: &CategoryInventory,
    k: usize,
) -> Result<Vec<Prediction>> {
    let Some(first) = members.first() else {
        return Err(Error::Data("ensemble needs at least one member".into()));
    };

    let mut by_idx: BTreeMap<u64, Vec<(&[String], &[f64])>> = first
        .iter()
        .map(|p| (p.idx, vec![(p.categories.as_slice(), p.scores.as_slice())]))
        .collect();
    for (m, preds) in members.iter().enumerate().skip(1) {
        for p in preds {
            let slot = by_idx.get_mut(&p.idx).ok_or_else(|| {
                Error::Data(format!(
                    "member {m} predicts idx {} that member 0 does not cover",
                    p.idx
                ))
            })?;
            slot.push((p.categories.as_slice(), p.scores.as_slice()));
        }
    }
    for (idx, votes) in &by_idx {
        if votes.len() != members.len() {
            return Err(Error::Data(format!(
                "idx {idx} is covered by {} of {} members",
                votes.len(),
                members.len()
            )));
        }
    }

    by_idx
        .into_iter()
        .map(|(idx, votes)| {
            let (categories, scores) = majority_vote(&votes, inventory, k)?;
            Ok(Prediction {
                idx,
                categories,
                scores,
            })
        })
        .collect()
}
