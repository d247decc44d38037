use std::sync::LazyLock;

use regex::Regex;

/// Footnote markers: `[12]`, `[a]`, `[note 3]`, `[Anm. 2]`, `[注 1]`.
static FOOTNOTE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\[\s*(?:\d+|[A-Za-z]|[A-Za-z]+\.?\s+\d+|注\s*\d+)\s*\]").expect("static regex")
});

const PROTECT_OPEN: char = '\u{E000}';
const PROTECT_CLOSE: char = '\u{E001}';

/// Visible cell text: footnote markers stripped, NBSP and other whitespace
/// collapsed to single spaces, trimmed. Idempotent.
pub fn normalize(raw: &str) -> String {
    let mut current = raw.to_string();
    loop {
        let stripped = FOOTNOTE.replace_all(&current, "");
        if stripped == current {
            break;
        }
        current = stripped.into_owned();
    }
    collapse_whitespace(&current)
}

/// Like [`normalize`], but the given byte ranges of `raw` (link labels) are
/// never treated as footnote markers.
pub(crate) fn normalize_protected(raw: &str, protected: &[(usize, usize)]) -> String {
    if protected.is_empty() {
        return normalize(raw);
    }
    let mut masked = String::with_capacity(raw.len());
    let mut saved = Vec::new();
    let mut pos = 0;
    for &(start, end) in protected {
        if start < pos || end > raw.len() || start > end {
            continue;
        }
        masked.push_str(&raw[pos..start]);
        masked.push(PROTECT_OPEN);
        masked.push_str(&saved.len().to_string());
        masked.push(PROTECT_CLOSE);
        saved.push(&raw[start..end]);
        pos = end;
    }
    masked.push_str(&raw[pos..]);
    let mut out = normalize(&masked);
    for (i, label) in saved.iter().enumerate().rev() {
        let token = format!("{PROTECT_OPEN}{i}{PROTECT_CLOSE}");
        out = out.replace(&token, label);
    }
    collapse_whitespace(&out)
}

pub(crate) fn collapse_whitespace(s: &str) -> String {
    s.split(|c: char| c.is_whitespace() || c == '\u{a0}' || c == '\u{200b}')
        .filter(|part| !part.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_markers() {
        assert_eq!(normalize("8,848[7]"), "8,848");
        assert_eq!(normalize("8,848 [a][note 3]"), "8,848");
        assert_eq!(normalize("Mount\u{a0}Everest [12]\n"), "Mount Everest");
        assert_eq!(normalize("Höhe[Anm. 2]"), "Höhe");
        assert_eq!(normalize("海拔[注 1]"), "海拔");
        assert_eq!(normalize("[[1]2]"), "");
        assert_eq!(normalize("K2 [K2]"), "K2 [K2]");
        assert_eq!(normalize("[citation]"), "[citation]");
    }

    #[test]
    fn protected_labels_survive() {
        let raw = "see [a] here[1]";
        assert_eq!(normalize_protected(raw, &[(4, 7)]), "see [a] here");
        assert_eq!(normalize(raw), "see here");
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in r"[\[\]a-z0-9 \t\n\u{a0}注.]{0,40}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once);
        }
    }
}
