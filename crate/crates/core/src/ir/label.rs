const TRAILING_PUNCTUATION: &[char] = &['.', ',', ';', ':', '!', '?'];

/// Normalise a label for matching: lowercase, trim, collapse internal
/// whitespace to single spaces and drop trailing punctuation.
///
/// The result may be empty; callers that need a non-empty label reject it.
pub fn canonicalize_label(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for word in lowered.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    let keep = out
        .trim_end_matches(|c: char| TRAILING_PUNCTUATION.contains(&c) || c.is_whitespace())
        .len();
    out.truncate(keep);
    out
}
