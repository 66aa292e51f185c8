//! Tab-separated replacement tables (emoticons, emoji, contractions).

use std::collections::HashMap;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// A pattern -> replacement table loaded from TSV. Supports both exact
/// token lookup and longest-pattern-first substring iteration.
#[derive(Debug, Clone, Default)]
pub struct ReplacementTable {
    exact: HashMap<String, String>,
    /// Sorted by descending pattern length, then pattern, so substring
    /// replacement is deterministic and prefers the longest match.
    ordered: Vec<(String, String)>,
}

impl ReplacementTable {
    /// Parse `pattern<TAB>replacement` lines. Blank lines and lines whose
    /// first character is `#` are skipped; duplicate patterns are an error.
    pub fn from_tsv(text: &str, source: &str) -> Result<Self> {
        let mut exact = HashMap::new();
        let mut ordered = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (pattern, replacement) = line.split_once('\t').ok_or_else(|| {
                Error::parse(source, i + 1, "expected pattern<TAB>replacement")
            })?;
            if pattern.is_empty() || replacement.is_empty() {
                return Err(Error::parse(source, i + 1, "empty pattern or replacement"));
            }
            if exact
                .insert(pattern.to_string(), replacement.to_string())
                .is_some()
            {
                return Err(Error::parse(
                    source,
                    i + 1,
                    format!("duplicate pattern {pattern:?}"),
                ));
            }
            ordered.push((pattern.to_string(), replacement.to_string()));
        }
        ordered.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(ReplacementTable { exact, ordered })
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.exact.get(token).map(String::as_str)
    }

    pub fn iter_longest_first(&self) -> impl Iterator<Item = (&str, &str)> {
        self.ordered.iter().map(|(p, r)| (p.as_str(), r.as_str()))
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }
}

macro_rules! builtin_table {
    ($fn_name:ident, $file:expr) => {
        pub fn $fn_name() -> &'static ReplacementTable {
            static TABLE: Lazy<ReplacementTable> = Lazy::new(|| {
                ReplacementTable::from_tsv(include_str!($file), $file)
                    .expect("builtin table must parse")
            });
            &TABLE
        }
    };
}

builtin_table!(default_smileys, "../../data/smileys.tsv");
builtin_table!(default_emojis, "../../data/emojis.tsv");
builtin_table!(default_contractions, "../../data/contractions.tsv");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_orders_longest_first() {
        let t = ReplacementTable::from_tsv("ab\tx\nabc\ty\n# comment\n\na\tz\n", "test").unwrap();
        assert_eq!(t.len(), 3);
        let order: Vec<&str> = t.iter_longest_first().map(|(p, _)| p).collect();
        assert_eq!(order, vec!["abc", "ab", "a"]);
        assert_eq!(t.get("ab"), Some("x"));
        assert_eq!(t.get("missing"), None);
    }

    #[test]
    fn rejects_missing_tab_with_line_number() {
        let err = ReplacementTable::from_tsv("ok\tfine\nbroken line\n", "t.tsv").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("t.tsv") && msg.contains("2"), "{msg}");
    }

    #[test]
    fn rejects_duplicates() {
        assert!(ReplacementTable::from_tsv(":)\thappy\n:)\tglad\n", "t").is_err());
    }

    #[test]
    fn builtin_tables_load() {
        assert!(default_smileys().get(":-)").is_some());
        assert!(default_emojis().len() > 50);
        assert_eq!(default_contractions().get("can't"), Some("can not"));
    }
}
