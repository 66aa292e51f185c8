//! Frequency-ranked vocabulary with reserved padding and OOV ids.

use std::collections::HashMap;

/// Id of the padding token (also the embedding row that stays zero).
pub const PAD_ID: u32 = 0;
/// Id assigned to any token absent from the vocabulary.
pub const OOV_ID: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    /// `words[i]` is the word with id `i + 2`.
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    /// Keep words seen at least `min_freq` times, rank by descending
    /// frequency (ties broken alphabetically) and truncate to
    /// `max_size - 2`, leaving room for the reserved ids.
    pub fn build<'a, D, T>(docs: D, max_size: usize, min_freq: u64) -> Vocabulary
    where
        D: IntoIterator<Item = T>,
        T: IntoIterator<Item = &'a String>,
    {
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for doc in docs {
            for token in doc {
                *freq.entry(token.as_str()).or_insert(0) += 1;
            }
        }
        let mut ranked: Vec<(&str, u64)> =
            freq.into_iter().filter(|&(_, n)| n >= min_freq).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(max_size.saturating_sub(2));
        Vocabulary::from_words(ranked.into_iter().map(|(w, _)| w.to_string()).collect())
    }

    /// Rebuild from the stored word list (checkpoint loading).
    pub fn from_words(words: Vec<String>) -> Vocabulary {
        let ids = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32 + 2))
            .collect();
        Vocabulary { words, ids }
    }

    pub fn id(&self, token: &str) -> u32 {
        self.ids.get(token).copied().unwrap_or(OOV_ID)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Number of embedding rows: the words plus the two reserved ids.
    pub fn table_rows(&self) -> usize {
        self.words.len() + 2
    }
}
