//! Row entities: which thing each table row is about, its Wikidata item,
//! and the entity x language alignment of an article family.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::mw_client::{ArticleRef, ClientError, InvalidInput, Qid, QidResolver};
use crate::table_parser::WikiTable;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TableRef {
    pub article: ArticleRef,
    pub table_index: usize,
}

impl fmt::Display for TableRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.article, self.table_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub table: TableRef,
    /// Index into the table's body rows.
    pub row_index: usize,
    pub surface: String,
    pub link_title: Option<String>,
    pub qid: Option<Qid>,
}

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("{0}: no column carries wiki links")]
    NoEntityColumn(TableRef),
    #[error("{table}: entity column hint {hint} is outside the {n_cols} columns")]
    HintOutOfRange {
        table: TableRef,
        hint: usize,
        n_cols: usize,
    },
}

/// Mentions extracted from one table.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEntities {
    pub column: usize,
    pub mentions: Vec<EntityMention>,
    /// Body rows whose entity cell had neither text nor link.
    pub skipped_rows: Vec<usize>,
}

/// Leftmost column with the highest share of linked body cells, or `None`
/// when no body cell links anywhere.
pub fn select_entity_column(table: &WikiTable) -> Option<usize> {
    if table.body_rows.is_empty() {
        return None;
    }
    let mut best: Option<(usize, usize)> = None;
    for col in 0..table.n_cols {
        let linked = table
            .body_rows
            .iter()
            .filter(|row| row[col].link_title.is_some())
            .count();
        // every column shares the same denominator, so counts compare like fractions
        if linked > 0 && best.is_none_or(|(_, n)| linked > n) {
            best = Some((col, linked));
        }
    }
    best.map(|(col, _)| col)
}

/// One mention per body row, taken from the entity column.
///
/// `column_hint` bypasses detection. A spanned copy in the entity column
/// carries the text and link of the cell it was copied from, so the row is
/// attributed to that same entity.
pub fn extract_row_entities(
    table: &WikiTable,
    column_hint: Option<usize>,
) -> Result<RowEntities, AlignError> {
    let table_ref = TableRef {
        article: table.source.clone(),
        table_index: table.table_index,
    };
    let column = match column_hint {
        Some(hint) if hint >= table.n_cols => {
            return Err(AlignError::HintOutOfRange {
                table: table_ref,
                hint,
                n_cols: table.n_cols,
            })
        }
        Some(hint) => hint,
        None if table.body_rows.is_empty() => 0,
        None => select_entity_column(table)
            .ok_or_else(|| AlignError::NoEntityColumn(table_ref.clone()))?,
    };

    let mut mentions = Vec::new();
    let mut skipped_rows = Vec::new();
    for (row_index, row) in table.body_rows.iter().enumerate() {
        let cell = &row[column];
        if cell.text.is_empty() && cell.link_title.is_none() {
            skipped_rows.push(row_index);
            continue;
        }
        mentions.push(EntityMention {
            table: table_ref.clone(),
            row_index,
            surface: cell.text.clone(),
            link_title: cell.link_title.clone(),
            qid: None,
        });
    }
    Ok(RowEntities {
        column,
        mentions,
        skipped_rows,
    })
}

/// Fills in `qid` for every mention with a link, resolving all distinct
/// link targets of the language in as few batched lookups as possible.
pub fn link_mentions(
    mut mentions: Vec<EntityMention>,
    language: &str,
    resolver: &dyn QidResolver,
) -> Result<Vec<EntityMention>, ClientError> {
    let mut titles: Vec<String> = mentions
        .iter()
        .filter_map(|m| m.link_title.clone())
        .collect();
    titles.sort();
    titles.dedup();
    if titles.is_empty() {
        return Ok(mentions);
    }
    let resolved = resolver.resolve_qids(language, &titles)?;
    for mention in &mut mentions {
        mention.qid = mention
            .link_title
            .as_ref()
            .and_then(|t| resolved.get(t).copied().flatten());
    }
    Ok(mentions)
}

/// Row identity across editions: a Wikidata item, or for rows without one
/// a surface form that stays local to its language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKey {
    Item(Qid),
    Unlinked { language: String, surface: String },
}

impl fmt::Display for EntityKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityKey::Item(qid) => write!(f, "{qid}"),
            EntityKey::Unlinked { language, surface } => write!(f, "unlinked:{language}:{surface}"),
        }
    }
}

impl FromStr for EntityKey {
    type Err = InvalidInput;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("unlinked:") {
            let (language, surface) = rest
                .split_once(':')
                .ok_or_else(|| InvalidInput(format!("malformed entity key {s:?}")))?;
            return Ok(EntityKey::Unlinked {
                language: language.to_string(),
                surface: surface.to_string(),
            });
        }
        s.parse().map(EntityKey::Item)
    }
}

impl Serialize for EntityKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Case-folded, diacritic-free, whitespace-collapsed surface form.
pub fn surface_key(surface: &str) -> String {
    let folded: String = surface
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .collect::<String>()
        .to_lowercase();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    pub table_index: usize,
    pub row_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityRow {
    pub key: EntityKey,
    /// First surface form seen per language.
    pub labels: BTreeMap<String, String>,
    pub occurrences: BTreeMap<String, Vec<Occurrence>>,
}

impl EntityRow {
    pub fn coverage(&self) -> usize {
        self.occurrences.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedMatrix {
    pub family: String,
    pub languages: Vec<String>,
    /// Ordered by descending language coverage, then item number; unlinked
    /// rows follow items of equal coverage.
    pub entities: Vec<EntityRow>,
}

impl AlignedMatrix {
    pub fn entity(&self, key: &EntityKey) -> Option<&EntityRow> {
        self.entities.iter().find(|e| &e.key == key)
    }

    pub fn occurrences(&self, key: &EntityKey, language: &str) -> &[Occurrence] {
        self.entity(key)
            .and_then(|e| e.occurrences.get(language))
            .map_or(&[], Vec::as_slice)
    }

    pub fn occurrence_count(&self, language: &str) -> usize {
        self.entities
            .iter()
            .filter_map(|e| e.occurrences.get(language))
            .map(Vec::len)
            .sum()
    }
}

/// Groups linked mentions by item across languages. Unlinked mentions are
/// grouped by [`surface_key`] within their own language only.
pub fn build_matrix(
    family: &str,
    languages: &[String],
    mentions: &BTreeMap<String, Vec<EntityMention>>,
) -> AlignedMatrix {
    let mut ordered_languages: Vec<String> = languages.to_vec();
    for language in mentions.keys() {
        if !ordered_languages.contains(language) {
            ordered_languages.push(language.clone());
        }
    }

    let mut rows: BTreeMap<EntityKey, EntityRow> = BTreeMap::new();
    for (language, list) in mentions {
        for mention in list {
            let key = match mention.qid {
                Some(qid) => EntityKey::Item(qid),
                None => EntityKey::Unlinked {
                    language: language.clone(),
                    surface: surface_key(if mention.surface.is_empty() {
                        mention.link_title.as_deref().unwrap_or_default()
                    } else {
                        &mention.surface
                    }),
                },
            };
            let row = rows.entry(key.clone()).or_insert_with(|| EntityRow {
                key,
                labels: BTreeMap::new(),
                occurrences: BTreeMap::new(),
            });
            row.labels
                .entry(language.clone())
                .or_insert_with(|| mention.surface.clone());
            row.occurrences
                .entry(language.clone())
                .or_default()
                .push(Occurrence {
                    table_index: mention.table.table_index,
                    row_index: mention.row_index,
                });
        }
    }

    let mut entities: Vec<EntityRow> = rows
        .into_values()
        .map(|mut row| {
            for list in row.occurrences.values_mut() {
                list.sort();
                list.dedup();
            }
            row
        })
        .collect();
    entities.sort_by(|a, b| (Reverse(a.coverage()), &a.key).cmp(&(Reverse(b.coverage()), &b.key)));
    AlignedMatrix {
        family: family.to_string(),
        languages: ordered_languages,
        entities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table_parser::Cell;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn table(rows: Vec<Vec<Cell>>) -> WikiTable {
        let n = rows[0].len();
        let mut grid = vec![(0..n)
            .map(|i| Cell::header(&format!("h{i}")))
            .collect::<Vec<_>>()];
        grid.extend(rows);
        WikiTable::from_grid(ArticleRef::new("en", "T").unwrap(), 0, None, grid).unwrap()
    }

    fn q(n: u64) -> Qid {
        Qid::new(n).unwrap()
    }

    #[test]
    fn links_in_second_column_win() {
        let t = table(vec![
            vec![
                Cell::plain("1"),
                Cell::linked("Everest", "Mount Everest"),
                Cell::plain("8849"),
            ],
            vec![
                Cell::plain("2"),
                Cell::linked("K2", "K2"),
                Cell::plain("8611"),
            ],
        ]);
        assert_eq!(select_entity_column(&t), Some(1));
        let found = extract_row_entities(&t, None).unwrap();
        assert_eq!(found.column, 1);
        assert_eq!(found.mentions.len(), 2);
        assert_eq!(found.mentions[1].link_title.as_deref(), Some("K2"));
    }

    #[test]
    fn ties_go_left() {
        let t = table(vec![vec![Cell::linked("a", "A"), Cell::linked("b", "B")]]);
        assert_eq!(select_entity_column(&t), Some(0));
    }

    #[test]
    fn hint_bypasses_detection() {
        let t = table(vec![vec![Cell::plain("Everest")]]);
        assert!(matches!(
            extract_row_entities(&t, None),
            Err(AlignError::NoEntityColumn(_))
        ));
        let found = extract_row_entities(&t, Some(0)).unwrap();
        assert_eq!(found.mentions.len(), 1);
        assert_eq!(found.mentions[0].surface, "Everest");
        assert_eq!(found.mentions[0].link_title, None);
        assert!(matches!(
            extract_row_entities(&t, Some(3)),
            Err(AlignError::HintOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_entity_cells_are_itemized() {
        let t = table(vec![vec![Cell::linked("A", "A")], vec![Cell::pad()]]);
        let found = extract_row_entities(&t, None).unwrap();
        assert_eq!(found.mentions.len(), 1);
        assert_eq!(found.skipped_rows, vec![1]);
    }

    struct CountingResolver(AtomicUsize);

    impl QidResolver for CountingResolver {
        fn resolve_qids(
            &self,
            _: &str,
            titles: &[String],
        ) -> Result<BTreeMap<String, Option<Qid>>, ClientError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            Ok(titles
                .iter()
                .map(|t| (t.clone(), (t == "Mount Everest").then(|| q(513))))
                .collect())
        }
    }

    #[test]
    fn linking_sets_qids_and_leaves_unlinked_alone() {
        let t = table(vec![
            vec![Cell::linked("Everest", "Mount Everest")],
            vec![Cell::plain("Nameless")],
            vec![Cell::linked("Red", "Redlink")],
        ]);
        let found = extract_row_entities(&t, Some(0)).unwrap();
        let resolver = CountingResolver(AtomicUsize::new(0));
        let linked = link_mentions(found.mentions, "en", &resolver).unwrap();
        assert_eq!(linked[0].qid, Some(q(513)));
        assert_eq!(linked[1].qid, None);
        assert_eq!(linked[2].qid, None);
        assert_eq!(resolver.0.load(Ordering::SeqCst), 1);
    }

    fn mention(
        lang: &str,
        table_index: usize,
        row: usize,
        surface: &str,
        qid: Option<u64>,
    ) -> EntityMention {
        EntityMention {
            table: TableRef {
                article: ArticleRef::new(lang, "T").unwrap(),
                table_index,
            },
            row_index: row,
            surface: surface.into(),
            link_title: None,
            qid: qid.map(q),
        }
    }

    #[test]
    fn unlinked_surfaces_never_cross_languages() {
        let mentions = BTreeMap::from([
            ("de".to_string(), vec![mention("de", 0, 0, "Everest", None)]),
            (
                "en".to_string(),
                vec![
                    mention("en", 0, 0, "Everest", None),
                    mention("en", 1, 3, "ÉVEREST", None),
                ],
            ),
        ]);
        let m = build_matrix("f", &["en".into(), "de".into()], &mentions);
        assert_eq!(m.entities.len(), 2);
        let en = EntityKey::Unlinked {
            language: "en".into(),
            surface: "everest".into(),
        };
        assert_eq!(m.occurrences(&en, "en").len(), 2);
        assert!(m.occurrences(&en, "de").is_empty());
    }

    #[test]
    fn ordering_by_coverage_then_item() {
        let mentions = BTreeMap::from([
            (
                "de".to_string(),
                vec![
                    mention("de", 0, 0, "b", Some(900)),
                    mention("de", 0, 1, "c", Some(7)),
                ],
            ),
            (
                "en".to_string(),
                vec![
                    mention("en", 0, 0, "a", Some(50)),
                    mention("en", 0, 1, "b", Some(900)),
                    mention("en", 0, 2, "z", None),
                ],
            ),
        ]);
        let m = build_matrix("f", &["en".into(), "de".into()], &mentions);
        let keys: Vec<String> = m.entities.iter().map(|e| e.key.to_string()).collect();
        assert_eq!(keys, ["Q900", "Q7", "Q50", "unlinked:en:z"]);
        assert_eq!(m.occurrence_count("en"), 3);
        assert_eq!(m.occurrence_count("de"), 2);
    }

    #[test]
    fn empty_family() {
        let m = build_matrix("f", &[], &BTreeMap::new());
        assert!(m.entities.is_empty());
    }

    #[test]
    fn entity_key_round_trip() {
        for s in ["Q513", "unlinked:en:mount everest", "unlinked:zh:a:b"] {
            assert_eq!(s.parse::<EntityKey>().unwrap().to_string(), s);
        }
        assert!("X1".parse::<EntityKey>().is_err());
    }
}
