/// A non-blank input line, trimmed, with its 1-based line number.
pub(crate) struct SourceLine<'a> {
    pub number: usize,
    pub text: &'a str,
}

pub(crate) fn source_lines(text: &str) -> impl Iterator<Item = SourceLine<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let text = raw.trim();
        (!text.is_empty()).then_some(SourceLine { number: i + 1, text })
    })
}

/// Strip a leading list marker (`- `, `* `, `• `, `+ `, `3. `, `3) `).
/// Returns the remainder and whether a marker was removed.
pub(crate) fn strip_list_marker(s: &str) -> (&str, bool) {
    for marker in ["- ", "* ", "• ", "+ "] {
        if let Some(rest) = s.strip_prefix(marker) {
            return (rest.trim_start(), true);
        }
    }
    let digits = s.len() - s.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits > 0 && digits <= 3 {
        let rest = &s[digits..];
        for punct in [". ", ") "] {
            if let Some(r) = rest.strip_prefix(punct) {
                return (r.trim_start(), true);
            }
        }
    }
    (s, false)
}

/// Byte index of the parenthesis closing the one at `open`, if balanced.
pub(crate) fn matching_paren(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s[open..].char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Remove parentheses that wrap the entire string, repeatedly.
pub(crate) fn strip_outer_parens(mut s: &str) -> &str {
    loop {
        s = s.trim();
        if s.starts_with('(') && matching_paren(s, 0) == Some(s.len() - 1) {
            s = &s[1..s.len() - 1];
        } else {
            return s;
        }
    }
}

/// Split on `sep` where it occurs outside any parentheses.
pub(crate) fn split_top_level<'a>(s: &'a str, sep: &str) -> Vec<&'a str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && bytes[i..].starts_with(sep.as_bytes()) {
            parts.push(&s[start..i]);
            i += sep.len();
            start = i;
            continue;
        }
        i += 1;
    }
    parts.push(&s[start..]);
    parts
}
