//! Tweet text normalization.

use once_cell::sync::Lazy;
use regex::Regex;

use super::tables::{
    default_contractions, default_emojis, default_smileys, ReplacementTable,
};

static URL_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S+").unwrap());
static MENTION_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"@\w+").unwrap());
static HASHTAG_WORD_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"#+(\w)").unwrap());
static HASHTAG_FULL_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"#\w+").unwrap());

/// Applies the normalization steps in a fixed order:
///
/// 1. remove URLs, 2. remove @mentions (and stray '@'), 3. hashtags (keep
/// the bare word, or drop the whole tag in strict mode), 4. replace
/// emoticon tokens, 5. replace emoji substrings, 6. lowercase, 7. expand
/// contractions, 8. collapse whitespace.
///
/// Both marker sweeps turn into spaces rather than deleting in place:
/// unwrapping "#tag" must never glue the kept word onto whatever precedes
/// it, or a second pass could see a mention or URL the first one did not.
/// With that, the output contains no '@' or '#' at all and running the
/// cleaner on its own output changes nothing.
#[derive(Debug, Clone)]
pub struct Cleaner<'a> {
    pub smileys: &'a ReplacementTable,
    pub emojis: &'a ReplacementTable,
    pub contractions: &'a ReplacementTable,
    /// Drop the entire hashtag instead of keeping the word after `#`.
    pub strict_hashtags: bool,
}

impl Default for Cleaner<'static> {
    fn default() -> Self {
        Cleaner {
            smileys: default_smileys(),
            emojis: default_emojis(),
            contractions: default_contractions(),
            strict_hashtags: false,
        }
    }
}

impl Cleaner<'_> {
    pub fn clean(&self, raw: &str) -> String {
        let s = URL_RE.replace_all(raw, " ");
        let s = MENTION_RE.replace_all(&s, " ").replace('@', " ");
        let s = if self.strict_hashtags {
            HASHTAG_FULL_RE.replace_all(&s, " ").replace('#', " ")
        } else {
            HASHTAG_WORD_RE.replace_all(&s, " $1").replace('#', " ")
        };
        let s = map_tokens(&s, self.smileys);
        let mut s = s;
        for (pattern, word) in self.emojis.iter_longest_first() {
            if s.contains(pattern) {
                s = s.replace(pattern, &format!(" {word} "));
            }
        }
        let s = s.to_lowercase();
        let s = map_tokens(&s, self.contractions);
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

fn map_tokens(s: &str, table: &ReplacementTable) -> String {
    s.split_whitespace()
        .map(|tok| table.get(tok).unwrap_or(tok))
        .collect::<Vec<_>>()
        .join(" ")
}
