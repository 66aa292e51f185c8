//! Whitespace tokenization with punctuation split into single-char tokens.

/// Characters that belong to a word: letters, digits, underscore and the
/// apostrophe (so possessives survive as one token).
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Split on whitespace, then peel every non-word character off into its own
/// token: `"well, done!"` -> `["well", ",", "done", "!"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        for c in chunk.chars() {
            if is_word_char(c) {
                word.push(c);
            } else {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(c.to_string());
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}
