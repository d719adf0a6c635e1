//! Word-level text normalisation shared by triggers and gazetteers.

/// Lowercases, turns every non-alphanumeric run into one space and pads
/// with spaces, so whole-word containment is a substring test.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push(' ');
    for c in text.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.ends_with(' ') {
            out.push(' ');
        }
    }
    if !out.ends_with(' ') {
        out.push(' ');
    }
    out
}

/// Byte position of `phrase` as whole words in an already normalised text.
pub fn find_phrase(normalized_text: &str, phrase: &str) -> Option<usize> {
    let needle = normalize(phrase);
    if needle.trim().is_empty() {
        return None;
    }
    normalized_text.find(&needle)
}
