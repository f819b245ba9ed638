//! Marker characters shared by the strategies.

/// Stands in for an original space in jamo, syllable and morpheme output (U+2B51).
pub const SPACE_MARKER: char = '\u{2B51}';
pub const SPACE_MARKER_STR: &str = "\u{2B51}";

/// Prefixed to each word (or morpheme) before subword encoding (U+2581).
pub const WORD_MARKER: char = '\u{2581}';
pub const WORD_MARKER_STR: &str = "\u{2581}";

/// Collapse runs of Unicode whitespace to one space and trim both ends.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

pub fn contains_marker(text: &str) -> bool {
    text.contains([SPACE_MARKER, WORD_MARKER])
}
