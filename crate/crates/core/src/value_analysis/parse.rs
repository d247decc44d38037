use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Number,
    Percentage,
    Ratio,
    Text,
}

/// A cell value read with the conventions of its language edition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedValue {
    pub kind: ValueKind,
    /// Numeric value; percentages in percent units (26.5 means 26.5 %),
    /// ratios as the derived percentage. `None` for text.
    pub magnitude: Option<f64>,
    /// Canonical unit (`m`, `ft`, `km`, `km2`, ...) or, for unknown units, the
    /// token as written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerator: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<u64>,
    pub original: String,
    pub language: String,
}

impl ParsedValue {
    fn text(original: &str, language: &str) -> Self {
        ParsedValue {
            kind: ValueKind::Text,
            magnitude: None,
            unit: None,
            numerator: None,
            denominator: None,
            original: original.to_string(),
            language: language.to_string(),
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.kind != ValueKind::Text
    }
}

/// Digit grouping and decimal mark of a language edition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumberLocale {
    pub group: char,
    pub decimal: char,
}

const COMMA_DECIMAL: &[&str] = &[
    "de", "it", "nl", "fr", "es", "pt", "ru", "pl", "sv", "da", "nb", "nn", "no", "fi", "cs", "sk",
    "sl", "hr", "sr", "bs", "ro", "hu", "tr", "id", "el", "bg", "uk", "et", "lt", "lv", "ca", "eu",
    "gl", "is", "vi", "az", "kk", "be",
];

pub fn number_locale(language: &str) -> NumberLocale {
    let base = language.split('-').next().unwrap_or(language);
    if COMMA_DECIMAL.contains(&base) {
        NumberLocale {
            group: '.',
            decimal: ',',
        }
    } else {
        NumberLocale {
            group: ',',
            decimal: '.',
        }
    }
}

fn is_space_group(c: char) -> bool {
    matches!(c, ' ' | '\u{a0}' | '\u{2009}' | '\u{202f}' | '\'' | '’')
}

/// Strict locale number: optional sign, digit groups of three after the
/// first, at most one decimal mark.
pub fn parse_locale_number(s: &str, locale: NumberLocale) -> Option<f64> {
    let s = s.trim();
    let (negative, body) = match s.strip_prefix(['-', '+']) {
        Some(rest) => (s.starts_with('-'), rest),
        None => (false, s),
    };
    if body.is_empty() {
        return None;
    }
    let mut parts = body.split(locale.decimal);
    let int_part = parts.next()?;
    let frac_part = parts.next();
    if parts.next().is_some() {
        return None;
    }
    let groups: Vec<&str> = int_part
        .split(|c| c == locale.group || is_space_group(c))
        .collect();
    if groups
        .iter()
        .any(|g| g.is_empty() || !g.bytes().all(|b| b.is_ascii_digit()))
    {
        return None;
    }
    if groups.len() > 1 && (groups[0].len() > 3 || groups[1..].iter().any(|g| g.len() != 3)) {
        return None;
    }
    let mut normalized: String = groups.concat();
    if let Some(frac) = frac_part {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        normalized.push('.');
        normalized.push_str(frac);
    }
    let value: f64 = normalized.parse().ok()?;
    Some(if negative { -value } else { value })
}

fn parse_locale_integer(s: &str, locale: NumberLocale) -> Option<u64> {
    let s = s.trim();
    if s.contains(locale.decimal) && !s.contains(locale.group) {
        return None;
    }
    let groups: Vec<&str> = s
        .split(|c| c == locale.group || is_space_group(c))
        .collect();
    if groups
        .iter()
        .any(|g| g.is_empty() || !g.bytes().all(|b| b.is_ascii_digit()))
    {
        return None;
    }
    if groups.len() > 1 && (groups[0].len() > 3 || groups[1..].iter().any(|g| g.len() != 3)) {
        return None;
    }
    groups.concat().parse().ok()
}

/// Formats a number the way the language edition writes it (used for
/// round-trip checks and reports).
pub fn format_number(value: f64, language: &str, decimals: usize) -> String {
    let locale = number_locale(language);
    let fixed = format!("{:.*}", decimals, value.abs());
    let (int_part, frac_part) = match fixed.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (fixed.as_str(), None),
    };
    let mut grouped = String::new();
    for (i, c) in int_part.chars().enumerate() {
        if i > 0 && (int_part.len() - i) % 3 == 0 {
            grouped.push(locale.group);
        }
        grouped.push(c);
    }
    let mut out = String::new();
    if value < 0.0 && fixed.chars().any(|c| c != '0' && c != '.') {
        out.push('-');
    }
    out.push_str(&grouped);
    if let Some(frac) = frac_part {
        out.push(locale.decimal);
        out.push_str(frac);
    }
    out
}

/// Canonical unit for a written unit token.
pub fn canonical_unit(token: &str) -> Option<&'static str> {
    let lower = token.trim().trim_end_matches('.').to_lowercase();
    Some(match lower.as_str() {
        "m" | "metre" | "metres" | "meter" | "meters" | "米" | "公尺" | "м" | "metri" | "metro" => {
            "m"
        }
        "ft" | "feet" | "foot" | "fuß" | "voet" | "piedi" | "英尺" => "ft",
        "km" | "kilometre" | "kilometres" | "kilometer" | "kilometers" | "公里" | "千米" | "км" => {
            "km"
        }
        "mi" | "mile" | "miles" | "英里" => "mi",
        "km2" | "km²" | "平方公里" | "平方千米" | "km^2" => "km2",
        "mi2" | "mi²" | "sq mi" | "sq. mi" => "mi2",
        "km3" | "km³" | "立方公里" | "立方千米" => "km3",
        "m2" | "m²" | "平方米" => "m2",
        _ => return None,
    })
}

static RATIO: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^(\d[\d.,\s'’]*?)\s*(?:/|von|out of|of|su|van|sur|de)\s*(\d[\d.,\s'’]*)$")
        .expect("static regex")
});
static NUMBER_PREFIX: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[+-]?\d[\d.,\u{a0}\u{2009}\u{202f}'’ ]*").expect("static regex")
});
static UNIT_TOKEN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[^\d\s()\[\]/%–—-][^\d\s()\[\]/%]{0,11}[23²³]?$").expect("static regex")
});

const APPROX_PREFIXES: &[&str] = &[
    "ca. ", "ca.", "c. ", "approx. ", "circa ", "~", "≈", "约", "約", "etwa ",
];

fn preclean(text: &str) -> String {
    let mut s: String = text
        .trim()
        .chars()
        .map(|c| match c {
            '\u{2212}' => '-',
            '％' => '%',
            '／' => '/',
            '０'..='９' => char::from_u32(c as u32 - '０' as u32 + '0' as u32).unwrap_or(c),
            _ => c,
        })
        .collect();
    for prefix in APPROX_PREFIXES {
        if let Some(rest) = s.strip_prefix(prefix) {
            s = rest.trim_start().to_string();
            break;
        }
    }
    s
}

/// Reads a footnote-free cell text as a number, percentage, ratio or plain
/// text, using the separators of `language`:
///
/// * en/zh and most others: `,` groups, `.` decimals;
/// * de/it/nl and other continental editions: `.` groups, `,` decimals.
///
/// `N%`/`N %` is a percentage, `A/B` or `A von B` a ratio of integers, a
/// number followed by one unit token a number with unit. Anything else is
/// text.
pub fn parse_value(text: &str, language: &str) -> ParsedValue {
    let cleaned = preclean(text);
    if cleaned.is_empty() {
        return ParsedValue::text(text, language);
    }
    let locale = number_locale(language);

    if let Some(caps) = RATIO.captures(&cleaned) {
        if let (Some(num), Some(den)) = (
            parse_locale_integer(&caps[1], locale),
            parse_locale_integer(&caps[2], locale),
        ) {
            if den > 0 {
                return ParsedValue {
                    kind: ValueKind::Ratio,
                    magnitude: Some(100.0 * num as f64 / den as f64),
                    unit: None,
                    numerator: Some(num),
                    denominator: Some(den),
                    original: text.to_string(),
                    language: language.to_string(),
                };
            }
        }
    }

    if let Some(rest) = cleaned.strip_suffix('%') {
        if let Some(value) = parse_locale_number(rest.trim_end(), locale) {
            return ParsedValue {
                kind: ValueKind::Percentage,
                magnitude: Some(value),
                ..ParsedValue::text(text, language)
            };
        }
    }

    if let Some(m) = NUMBER_PREFIX.find(&cleaned) {
        let number_text = m
            .as_str()
            .trim_end_matches(|c: char| c.is_whitespace() || is_space_group(c));
        let rest = cleaned[number_text.len()..].trim();
        if let Some(value) = parse_locale_number(number_text, locale) {
            if rest.is_empty() {
                return ParsedValue {
                    kind: ValueKind::Number,
                    magnitude: Some(value),
                    ..ParsedValue::text(text, language)
                };
            }
            if UNIT_TOKEN.is_match(rest) || canonical_unit(rest).is_some() {
                let unit = canonical_unit(rest)
                    .map(str::to_string)
                    .unwrap_or_else(|| rest.to_lowercase());
                return ParsedValue {
                    kind: ValueKind::Number,
                    magnitude: Some(value),
                    unit: Some(unit),
                    ..ParsedValue::text(text, language)
                };
            }
        }
    }
    ParsedValue::text(text, language)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn locale_table() {
        let v = parse_value("8,849", "en");
        assert_eq!(
            (v.kind, v.magnitude, v.unit.as_deref()),
            (ValueKind::Number, Some(8849.0), None)
        );
        let v = parse_value("8.848", "de");
        assert_eq!((v.kind, v.magnitude), (ValueKind::Number, Some(8848.0)));
        let v = parse_value("26,5 %", "it");
        assert_eq!((v.kind, v.magnitude), (ValueKind::Percentage, Some(26.5)));
        let v = parse_value("80/302", "de");
        assert_eq!(
            (v.kind, v.numerator, v.denominator),
            (ValueKind::Ratio, Some(80), Some(302))
        );
        let v = parse_value("8,848米", "zh");
        assert_eq!(
            (v.kind, v.magnitude, v.unit.as_deref()),
            (ValueKind::Number, Some(8848.0), Some("m"))
        );
        let v = parse_value("", "en");
        assert_eq!((v.kind, v.original.as_str()), (ValueKind::Text, ""));
    }

    #[test]
    fn more_forms() {
        assert_eq!(parse_value("29.5%", "zh").magnitude, Some(29.5));
        assert_eq!(parse_value("80 von 302", "de").denominator, Some(302));
        assert_eq!(parse_value("8.848", "en").magnitude, Some(8.848));
        assert_eq!(parse_value("8,848", "de").magnitude, Some(8.848));
        assert_eq!(parse_value("8 849", "fr").magnitude, Some(8849.0));
        assert_eq!(parse_value("1.234.567,5", "nl").magnitude, Some(1234567.5));
        assert_eq!(parse_value("29,032 ft", "en").unit.as_deref(), Some("ft"));
        assert_eq!(parse_value("82,100 km²", "en").unit.as_deref(), Some("km2"));
        assert_eq!(parse_value("8848.86公尺", "zh").magnitude, Some(8848.86));
        assert_eq!(parse_value("−5", "en").magnitude, Some(-5.0));
        assert_eq!(parse_value("ca. 4.000", "de").magnitude, Some(4000.0));
        let v = parse_value("12 furlongs", "en");
        assert_eq!(
            (v.kind, v.unit.as_deref()),
            (ValueKind::Number, Some("furlongs"))
        );
    }

    #[test]
    fn text_fallbacks() {
        for s in [
            "Nepal",
            "1,23,4",
            "1953–1960",
            "8/0",
            "8,849 (2020 survey)",
            "n/a",
            "12.5.1953",
        ] {
            assert_eq!(parse_value(s, "en").kind, ValueKind::Text, "{s}");
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(format_number(8849.0, "en", 0), "8,849");
        assert_eq!(format_number(8848.0, "de", 0), "8.848");
        assert_eq!(format_number(26.5, "it", 1), "26,5");
        assert_eq!(format_number(-1234.5, "en", 2), "-1,234.50");
        assert_eq!(format_number(999.0, "en", 0), "999");
    }

    proptest! {
        #[test]
        fn numbers_round_trip(
            cents in -1_000_000_000i64..1_000_000_000,
            decimals in 0usize..3,
            lang in prop::sample::select(vec!["en", "de", "zh", "it", "nl"]),
            percent in any::<bool>(),
        ) {
            let scale = 10f64.powi(decimals as i32);
            let value = (cents as f64 / 100.0 * scale).round() / scale;
            let mut text = format_number(value, lang, decimals);
            if percent {
                text.push_str(" %");
            }
            let parsed = parse_value(&text, lang);
            prop_assert_eq!(parsed.kind, if percent { ValueKind::Percentage } else { ValueKind::Number });
            let back = parsed.magnitude.unwrap();
            prop_assert!((back - value).abs() < 1e-9, "{} -> {}", text, back);
        }
    }
}
