//! Column header normalization, cross-language attribute mapping and the
//! attribute x language presence grid.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::mw_client::InvalidInput;
use crate::table_parser::{normalize, WikiTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeKey {
    /// Lowercase snake_case name, e.g. `death_rate`.
    pub canonical: String,
    /// Header spellings per language.
    pub aliases: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("header {header:?} ({language}) is claimed by both {first} and {second}")]
    MappingConflict {
        language: String,
        header: String,
        first: String,
        second: String,
    },
    #[error("attribute name {0:?} is not lowercase snake_case")]
    InvalidCanonical(String),
    #[error("attribute {0:?} is defined twice")]
    DuplicateCanonical(String),
    #[error("cannot read header map {path}: {message}")]
    Load { path: String, message: String },
}

#[derive(Debug, Deserialize, Serialize)]
struct MappingFile {
    attributes: Vec<AttributeKey>,
}

/// Curated header dictionary. Each (language, normalized header) pair maps to
/// at most one attribute.
#[derive(Debug, Clone, Default)]
pub struct HeaderMapping {
    attributes: Vec<AttributeKey>,
    index: HashMap<(String, String), usize>,
}

static SNAKE_CASE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[a-z0-9]+(_[a-z0-9]+)*$").expect("static regex"));

impl HeaderMapping {
    /// Aliases are normalized with [`normalize_header`] before indexing.
    pub fn new(attributes: Vec<AttributeKey>) -> Result<Self, MappingError> {
        let mut index: HashMap<(String, String), usize> = HashMap::new();
        let mut seen = BTreeSet::new();
        let mut normalized_attributes = Vec::with_capacity(attributes.len());
        for (i, attribute) in attributes.into_iter().enumerate() {
            if !SNAKE_CASE.is_match(&attribute.canonical) {
                return Err(MappingError::InvalidCanonical(attribute.canonical));
            }
            if !seen.insert(attribute.canonical.clone()) {
                return Err(MappingError::DuplicateCanonical(attribute.canonical));
            }
            let mut aliases = BTreeMap::new();
            for (language, spellings) in &attribute.aliases {
                let set: &mut BTreeSet<String> = aliases.entry(language.clone()).or_default();
                for spelling in spellings {
                    let header = normalize_header(spelling, language);
                    if let Some(&other) = index.get(&(language.clone(), header.clone())) {
                        if other != i {
                            return Err(MappingError::MappingConflict {
                                language: language.clone(),
                                header,
                                first: normalized_attributes
                                    .get(other)
                                    .map(|a: &AttributeKey| a.canonical.clone())
                                    .unwrap_or_default(),
                                second: attribute.canonical.clone(),
                            });
                        }
                    }
                    index.insert((language.clone(), header.clone()), i);
                    set.insert(header);
                }
            }
            normalized_attributes.push(AttributeKey {
                canonical: attribute.canonical,
                aliases,
            });
        }
        Ok(HeaderMapping {
            attributes: normalized_attributes,
            index,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        let file: MappingFile = serde_json::from_str(text).map_err(|e| MappingError::Load {
            path: "<inline>".into(),
            message: e.to_string(),
        })?;
        Self::new(file.attributes)
    }

    pub fn load(path: &Path) -> Result<Self, MappingError> {
        let text = std::fs::read_to_string(path).map_err(|e| MappingError::Load {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text).map_err(|e| match e {
            MappingError::Load { message, .. } => MappingError::Load {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    pub fn attributes(&self) -> &[AttributeKey] {
        &self.attributes
    }

    fn position(&self, canonical: &str) -> Option<usize> {
        self.attributes
            .iter()
            .position(|a| a.canonical == canonical)
    }

    pub fn lookup(&self, normalized: &str, language: &str) -> Option<&AttributeKey> {
        self.index
            .get(&(language.to_string(), normalized.to_string()))
            .map(|&i| &self.attributes[i])
    }
}

/// A grid row: a mapped attribute, or a header nobody mapped, which stays
/// tied to the language it was seen in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MappedAttribute {
    Known(String),
    Unmapped { language: String, header: String },
}

impl MappedAttribute {
    pub fn canonical(&self) -> Option<&str> {
        match self {
            MappedAttribute::Known(c) => Some(c),
            MappedAttribute::Unmapped { .. } => None,
        }
    }
}

impl fmt::Display for MappedAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MappedAttribute::Known(c) => f.write_str(c),
            MappedAttribute::Unmapped { language, header } => {
                write!(f, "unmapped:{language}:{header}")
            }
        }
    }
}

impl FromStr for MappedAttribute {
    type Err = InvalidInput;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("unmapped:") {
            Some(rest) => {
                let (language, header) = rest
                    .split_once(':')
                    .ok_or_else(|| InvalidInput(format!("malformed attribute {s:?}")))?;
                Ok(MappedAttribute::Unmapped {
                    language: language.into(),
                    header: header.into(),
                })
            }
            None if SNAKE_CASE.is_match(s) => Ok(MappedAttribute::Known(s.into())),
            None => Err(InvalidInput(format!("malformed attribute {s:?}"))),
        }
    }
}

impl Serialize for MappedAttribute {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MappedAttribute {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

static PAREN_GROUP: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\s*[\(（][^\(\)（）]*[\)）]").expect("static regex"));
static SLASH: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s*[/／]\s*").expect("static regex"));
static REPEATED_PUNCT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"([/.,:;\-])+").expect("static regex"));

const EDGE_PUNCT: &[char] = &[
    ':', ';', ',', '.', '*', '†', '‡', '!', '?', '：', '，', '。', '、', ' ',
];

fn is_cjk_language(language: &str) -> bool {
    ["zh", "ja", "ko", "yue", "wuu", "gan", "lzh", "cdo", "hak"]
        .iter()
        .any(|p| language == *p || language.starts_with(&format!("{p}-")))
}

fn is_cjk_char(c: char) -> bool {
    matches!(c as u32,
        0x2E80..=0x9FFF | 0xAC00..=0xD7AF | 0xF900..=0xFAFF | 0xFF00..=0xFFEF | 0x20000..=0x2FA1F)
}

/// Comparable form of a column header: case-folded, parenthesized parts
/// (units) removed, whitespace and punctuation runs collapsed. In CJK
/// editions spaces next to CJK characters are dropped and none are added.
pub fn normalize_header(raw: &str, language: &str) -> String {
    let mut text = normalize(raw).to_lowercase();
    loop {
        let stripped = PAREN_GROUP.replace_all(&text, "");
        if stripped == text {
            break;
        }
        text = stripped.into_owned();
    }
    let text = REPEATED_PUNCT.replace_all(&text, "$1");
    let cjk = is_cjk_language(language);
    let text = SLASH.replace_all(&text, if cjk { "/" } else { " / " });
    let text = crate::table_parser::normalize(&text);
    let text = if cjk {
        let chars: Vec<char> = text.chars().collect();
        chars
            .iter()
            .enumerate()
            .filter(|&(i, &c)| {
                if c != ' ' {
                    return true;
                }
                let prev = i.checked_sub(1).map(|j| chars[j]);
                let next = chars.get(i + 1).copied();
                !(prev.is_some_and(is_cjk_char) || next.is_some_and(is_cjk_char))
            })
            .map(|(_, &c)| c)
            .collect()
    } else {
        text
    };
    text.trim_matches(EDGE_PUNCT).to_string()
}

/// Looks up a normalized header in the mapping for one language.
pub fn map_attribute(normalized: &str, language: &str, mapping: &HeaderMapping) -> MappedAttribute {
    match mapping.lookup(normalized, language) {
        Some(key) => MappedAttribute::Known(key.canonical.clone()),
        None => MappedAttribute::Unmapped {
            language: language.to_string(),
            header: normalized.to_string(),
        },
    }
}

/// Attribute of every column of a table. Columns without header text are
/// named by position (`#3`).
pub fn map_columns(table: &WikiTable, mapping: &HeaderMapping) -> Vec<MappedAttribute> {
    let language = &table.source.language;
    table
        .column_labels()
        .iter()
        .enumerate()
        .map(|(col, label)| {
            let normalized = normalize_header(label, language);
            let normalized = if normalized.is_empty() {
                format!("#{}", col + 1)
            } else {
                normalized
            };
            map_attribute(&normalized, language, mapping)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresenceGrid {
    pub family: String,
    pub attributes: Vec<MappedAttribute>,
    pub languages: Vec<String>,
    /// `present[attribute][language]`
    pub present: Vec<Vec<bool>>,
}

impl PresenceGrid {
    pub fn row(&self, attribute: &MappedAttribute) -> Option<&[bool]> {
        self.attributes
            .iter()
            .position(|a| a == attribute)
            .map(|i| self.present[i].as_slice())
    }

    pub fn is_present(&self, attribute: &MappedAttribute, language: &str) -> bool {
        let Some(l) = self.languages.iter().position(|x| x == language) else {
            return false;
        };
        self.row(attribute).is_some_and(|row| row[l])
    }
}

/// Which attributes each language's main table provides.
///
/// Only languages with a main table get a grid column, ordered as in
/// `languages`. Mapped attributes come first in mapping order, then
/// unmapped headers by language and text.
pub fn build_presence_grid(
    family: &str,
    languages: &[String],
    main_tables: &BTreeMap<String, &WikiTable>,
    mapping: &HeaderMapping,
) -> PresenceGrid {
    let mut grid_languages: Vec<String> = languages
        .iter()
        .filter(|l| main_tables.contains_key(*l))
        .cloned()
        .collect();
    for language in main_tables.keys() {
        if !grid_languages.contains(language) {
            grid_languages.push(language.clone());
        }
    }

    let mut seen: BTreeMap<MappedAttribute, BTreeSet<usize>> = BTreeMap::new();
    for (l, language) in grid_languages.iter().enumerate() {
        for attribute in map_columns(main_tables[language], mapping) {
            seen.entry(attribute).or_default().insert(l);
        }
    }

    let language_rank = |language: &str| {
        grid_languages
            .iter()
            .position(|l| l == language)
            .unwrap_or(usize::MAX)
    };
    let mut attributes: Vec<MappedAttribute> = seen.keys().cloned().collect();
    attributes.sort_by_key(|a| match a {
        MappedAttribute::Known(c) => (0, mapping.position(c).unwrap_or(usize::MAX), String::new()),
        MappedAttribute::Unmapped { language, header } => {
            (1, language_rank(language), header.clone())
        }
    });
    let present = attributes
        .iter()
        .map(|a| {
            (0..grid_languages.len())
                .map(|l| seen[a].contains(&l))
                .collect()
        })
        .collect();
    PresenceGrid {
        family: family.to_string(),
        attributes,
        languages: grid_languages,
        present,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mw_client::ArticleRef;
    use crate::table_parser::Cell;

    fn mapping() -> HeaderMapping {
        HeaderMapping::from_json(
            r#"{"attributes": [
                {"canonical": "death_rate", "aliases": {"en": ["Death rate"], "zh": ["死亡率"], "it": ["Tasso di mortalità"]}},
                {"canonical": "height", "aliases": {"en": ["Height (m)", "Elevation"], "zh": ["海拔（米）"]}}
            ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn header_normalization() {
        assert_eq!(normalize_header("Height (m)", "en"), "height");
        assert_eq!(
            normalize_header("Tasso di mortalità", "it"),
            "tasso di mortalità"
        );
        assert_eq!(
            normalize_header("Besteigungen  /  Tote", "de"),
            "besteigungen / tote"
        );
        assert_eq!(
            normalize_header("Tote/Besteigungen", "de"),
            "tote / besteigungen"
        );
        assert_eq!(normalize_header("海拔（米）", "zh"), "海拔");
        assert_eq!(normalize_header("登顶 人数", "zh"), "登顶人数");
        assert_eq!(normalize_header("Name:", "en"), "name");
        assert_eq!(normalize_header("Height[1] (ft)", "en"), "height");
        assert_eq!(
            normalize_header("First ascent (year) (approx.)", "en"),
            "first ascent"
        );
    }

    #[test]
    fn header_normalization_is_idempotent() {
        for (raw, lang) in [
            ("Height (m)", "en"),
            ("海拔 （米）", "zh"),
            ("A // B", "de"),
            ("X..", "nl"),
        ] {
            let once = normalize_header(raw, lang);
            assert_eq!(normalize_header(&once, lang), once);
        }
    }

    #[test]
    fn mapping_lookups() {
        let m = mapping();
        assert_eq!(
            map_attribute("death rate", "en", &m),
            MappedAttribute::Known("death_rate".into())
        );
        assert_eq!(
            map_attribute("死亡率", "zh", &m),
            MappedAttribute::Known("death_rate".into())
        );
        assert_eq!(
            map_attribute("海拔", "zh", &m),
            MappedAttribute::Known("height".into())
        );
        assert_eq!(
            map_attribute("zzz unknown", "en", &m),
            MappedAttribute::Unmapped {
                language: "en".into(),
                header: "zzz unknown".into()
            }
        );
        // aliases are per language
        assert!(matches!(
            map_attribute("death rate", "de", &m),
            MappedAttribute::Unmapped { .. }
        ));
    }

    #[test]
    fn conflicting_aliases_fail_at_load() {
        let err = HeaderMapping::from_json(
            r#"{"attributes": [
                {"canonical": "height", "aliases": {"en": ["Height (m)"]}},
                {"canonical": "elevation", "aliases": {"en": ["height"]}}
            ]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, MappingError::MappingConflict { .. }), "{err}");
        assert!(matches!(
            HeaderMapping::from_json(r#"{"attributes": [{"canonical": "Height", "aliases": {}}]}"#),
            Err(MappingError::InvalidCanonical(_))
        ));
        // the same header in two languages is fine
        assert!(HeaderMapping::from_json(
            r#"{"attributes": [
                {"canonical": "a", "aliases": {"en": ["x"]}},
                {"canonical": "b", "aliases": {"de": ["x"]}}
            ]}"#
        )
        .is_ok());
    }

    fn table(lang: &str, headers: &[&str]) -> WikiTable {
        let grid = vec![
            headers.iter().map(|h| Cell::header(h)).collect(),
            headers.iter().map(|_| Cell::plain("1")).collect(),
        ];
        WikiTable::from_grid(ArticleRef::new(lang, "T").unwrap(), 0, None, grid).unwrap()
    }

    #[test]
    fn grid_keeps_every_column() {
        let m = mapping();
        let en = table("en", &["Height (m)", "Death rate", "Notes", ""]);
        let zh = table("zh", &["海拔（米）", "备注"]);
        let mains = BTreeMap::from([("en".to_string(), &en), ("zh".to_string(), &zh)]);
        let grid = build_presence_grid("f", &["zh".into(), "en".into(), "nl".into()], &mains, &m);
        assert_eq!(grid.languages, ["zh", "en"]);
        let labels: Vec<String> = grid.attributes.iter().map(ToString::to_string).collect();
        assert_eq!(
            labels,
            [
                "death_rate",
                "height",
                "unmapped:zh:备注",
                "unmapped:en:#4",
                "unmapped:en:notes"
            ]
        );
        assert_eq!(
            grid.row(&MappedAttribute::Known("height".into())),
            Some(&[true, true][..])
        );
        assert_eq!(
            grid.row(&MappedAttribute::Known("death_rate".into())),
            Some(&[false, true][..])
        );
        assert!(grid.present.iter().all(|row| row.iter().any(|&p| p)));
    }

    #[test]
    fn single_language_grid_is_all_true() {
        let m = mapping();
        let en = table("en", &["Height (m)", "Notes"]);
        let grid = build_presence_grid(
            "f",
            &["en".into()],
            &BTreeMap::from([("en".to_string(), &en)]),
            &m,
        );
        assert_eq!(grid.languages.len(), 1);
        assert!(grid.present.iter().all(|row| row == &[true]));
    }
}
