//! Token-to-id encoding with fixed-length truncation and padding.

use super::vocab::{Vocabulary, PAD_ID};

/// Map tokens to ids, truncate to `max_len` and right-pad with the padding
/// id so every sequence has exactly `max_len` entries.
pub fn encode(tokens: &[String], vocab: &Vocabulary, max_len: usize) -> Vec<u32> {
    let mut ids: Vec<u32> = tokens
        .iter()
        .take(max_len)
        .map(|t| vocab.id(t))
        .collect();
    ids.resize(max_len, PAD_ID);
    ids
}
