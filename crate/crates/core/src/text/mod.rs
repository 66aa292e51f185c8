//! Text normalization, tokenization and integer encoding.
//!
//! Cleaning applies a fixed sequence of steps (URLs, mentions, hashtags,
//! emoticons, emoji, lowercasing, contractions, whitespace) and is
//! idempotent: cleaning already-clean text is a no-op. Tokens are then
//! mapped through a frequency-ranked vocabulary with reserved ids 0
//! (padding) and 1 (out of vocabulary).

mod clean;
mod encode;
mod tables;
mod tokenize;
mod vocab;

pub use clean::Cleaner;
pub use encode::encode;
pub use tables::{default_contractions, default_emojis, default_smileys, ReplacementTable};
pub use tokenize::tokenize;
pub use vocab::{Vocabulary, OOV_ID, PAD_ID};
