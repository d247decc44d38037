//! Per-page table, reference and column counts, aggregated per family and
//! per language.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::mw_client::ArticleRef;
use crate::table_parser::WikiTable;
use crate::value_analysis::MissingVocab;

/// Index of the table with the largest body area; ties go to the earlier
/// table. A valid `override_index` wins.
pub fn select_main_table(tables: &[WikiTable], override_index: Option<usize>) -> Option<usize> {
    if let Some(i) = override_index.filter(|i| *i < tables.len()) {
        return Some(i);
    }
    tables
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.area().cmp(&b.area()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnCounts {
    pub total: usize,
    pub complete: usize,
    pub incomplete: usize,
}

impl ColumnCounts {
    fn add(&mut self, other: ColumnCounts) {
        self.total += other.total;
        self.complete += other.complete;
        self.incomplete += other.incomplete;
    }
}

/// A column is complete when none of its body cells is missing. Pad cells
/// count as missing. A table without body rows is vacuously complete.
pub fn column_completeness(table: &WikiTable, vocab: &MissingVocab) -> ColumnCounts {
    let incomplete = (0..table.n_cols)
        .filter(|&col| {
            table
                .body_rows
                .iter()
                .any(|row| row[col].is_pad || vocab.is_missing(&row[col].text))
        })
        .count();
    ColumnCounts {
        total: table.n_cols,
        complete: table.n_cols - incomplete,
        incomplete,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageStats {
    pub article: ArticleRef,
    pub table_count: usize,
    pub reference_count: usize,
    pub main_table_index: Option<usize>,
    pub total_columns: usize,
    pub complete_columns: usize,
    pub incomplete_columns: usize,
    /// Column counts over every table, not only the main one. Only filled
    /// when explicitly requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_tables_columns: Option<ColumnCounts>,
}

/// What [`page_stats`] needs from one fetched page.
pub struct PageInput<'a> {
    pub article: ArticleRef,
    pub tables: &'a [WikiTable],
    pub reference_count: usize,
    pub main_table_override: Option<usize>,
}

pub fn page_stats(page: &PageInput, vocab: &MissingVocab, all_tables: bool) -> PageStats {
    let main = select_main_table(page.tables, page.main_table_override);
    let counts = main
        .map(|i| column_completeness(&page.tables[i], vocab))
        .unwrap_or_default();
    let all_tables_columns = all_tables.then(|| {
        let mut sum = ColumnCounts::default();
        for t in page.tables {
            sum.add(column_completeness(t, vocab));
        }
        sum
    });
    PageStats {
        article: page.article.clone(),
        table_count: page.tables.len(),
        reference_count: page.reference_count,
        main_table_index: main,
        total_columns: counts.total,
        complete_columns: counts.complete,
        incomplete_columns: counts.incomplete,
        all_tables_columns,
    }
}

/// Totals over a set of pages. Means and rates are rounded to one decimal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregate {
    pub pages: usize,
    pub tables: usize,
    pub references: usize,
    pub mean_references: f64,
    pub total_columns: usize,
    pub complete_columns: usize,
    pub incomplete_columns: usize,
    /// Percentage of main-table columns with a missing cell.
    pub incompleteness_rate: f64,
}

pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        round1(100.0 * part as f64 / whole as f64)
    }
}

impl Aggregate {
    pub fn of<'a>(pages: impl IntoIterator<Item = &'a PageStats>) -> Aggregate {
        let mut agg = Aggregate::default();
        for p in pages {
            agg.pages += 1;
            agg.tables += p.table_count;
            agg.references += p.reference_count;
            agg.total_columns += p.total_columns;
            agg.complete_columns += p.complete_columns;
            agg.incomplete_columns += p.incomplete_columns;
        }
        agg.mean_references = if agg.pages == 0 {
            0.0
        } else {
            round1(agg.references as f64 / agg.pages as f64)
        };
        agg.incompleteness_rate = percent(agg.incomplete_columns, agg.total_columns);
        agg
    }

    pub fn complete_rate(&self) -> f64 {
        percent(self.complete_columns, self.total_columns)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyStats {
    pub family: String,
    /// Editions without the article have no entry.
    pub per_language: BTreeMap<String, Vec<PageStats>>,
    pub aggregates: BTreeMap<String, Aggregate>,
}

impl FamilyStats {
    pub fn new(family: &str, per_language: BTreeMap<String, Vec<PageStats>>) -> Self {
        let aggregates = per_language
            .iter()
            .map(|(l, pages)| (l.clone(), Aggregate::of(pages)))
            .collect();
        FamilyStats {
            family: family.to_string(),
            per_language,
            aggregates,
        }
    }

    /// True when the stored aggregates match a recomputation.
    pub fn is_consistent(&self) -> bool {
        FamilyStats::new(&self.family, self.per_language.clone()) == *self
    }

    pub fn pages(&self) -> impl Iterator<Item = &PageStats> {
        self.per_language.values().flatten()
    }
}

pub fn compute_family_stats(
    family: &str,
    pages: &BTreeMap<String, PageInput>,
    vocab: &MissingVocab,
    all_tables: bool,
) -> FamilyStats {
    let per_language = pages
        .iter()
        .map(|(l, p)| (l.clone(), vec![page_stats(p, vocab, all_tables)]))
        .collect();
    FamilyStats::new(family, per_language)
}

/// Aggregates over several families, per language and overall.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub per_language: BTreeMap<String, Aggregate>,
    pub overall: Aggregate,
    pub complete_rate: f64,
}

impl CorpusStats {
    pub fn of<'a>(families: impl IntoIterator<Item = &'a FamilyStats>) -> CorpusStats {
        let mut by_language: BTreeMap<String, Vec<&PageStats>> = BTreeMap::new();
        let mut all = Vec::new();
        for family in families {
            for (l, pages) in &family.per_language {
                by_language.entry(l.clone()).or_default().extend(pages);
                all.extend(pages);
            }
        }
        let overall = Aggregate::of(all);
        CorpusStats {
            per_language: by_language
                .into_iter()
                .map(|(l, pages)| (l, Aggregate::of(pages)))
                .collect(),
            complete_rate: overall.complete_rate(),
            overall,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table_parser::Cell;
    use proptest::prelude::*;

    fn sized(rows: usize, cols: usize, index: usize) -> WikiTable {
        let mut grid = vec![(0..cols)
            .map(|c| Cell::header(&format!("h{c}")))
            .collect::<Vec<_>>()];
        for r in 0..rows {
            grid.push(
                (0..cols)
                    .map(|c| Cell::plain(&format!("{r}.{c}")))
                    .collect(),
            );
        }
        WikiTable::from_grid(ArticleRef::new("en", "T").unwrap(), index, None, grid).unwrap()
    }

    #[test]
    fn main_table_selection() {
        assert_eq!(
            select_main_table(&[sized(3, 2, 0), sized(7, 5, 1)], None),
            Some(1)
        );
        assert_eq!(
            select_main_table(&[sized(5, 4, 0), sized(5, 4, 1)], None),
            Some(0)
        );
        assert_eq!(select_main_table(&[], None), None);
        assert_eq!(
            select_main_table(&[sized(3, 2, 0), sized(7, 5, 1)], Some(0)),
            Some(0)
        );
        assert_eq!(select_main_table(&[sized(3, 2, 0)], Some(4)), Some(0));
    }

    #[test]
    fn completeness_counts() {
        let mut t = sized(3, 3, 0);
        t.body_rows[1][1] = Cell::plain("—");
        let vocab = MissingVocab::default();
        assert_eq!(
            column_completeness(&t, &vocab),
            ColumnCounts {
                total: 3,
                complete: 2,
                incomplete: 1
            }
        );
        t.body_rows[0][2] = Cell::pad();
        assert_eq!(column_completeness(&t, &vocab).incomplete, 2);
        let empty = sized(0, 4, 0);
        assert_eq!(
            column_completeness(&empty, &vocab),
            ColumnCounts {
                total: 4,
                complete: 4,
                incomplete: 0
            }
        );
    }

    #[test]
    fn aggregates_round_and_recompute() {
        let tables = vec![sized(4, 3, 0)];
        let mut pages = BTreeMap::new();
        for (lang, refs) in [("en", 10), ("de", 3)] {
            pages.insert(
                lang.to_string(),
                PageInput {
                    article: ArticleRef::new(lang, "T").unwrap(),
                    tables: &tables,
                    reference_count: refs,
                    main_table_override: None,
                },
            );
        }
        let stats = compute_family_stats("f", &pages, &MissingVocab::default(), true);
        assert!(stats.is_consistent());
        assert_eq!(stats.aggregates["en"].references, 10);
        assert_eq!(
            stats.per_language["de"][0]
                .all_tables_columns
                .unwrap()
                .total,
            3
        );
        let corpus = CorpusStats::of([&stats, &stats]);
        assert_eq!(corpus.overall.pages, 4);
        assert_eq!(corpus.per_language["en"].mean_references, 10.0);
        assert_eq!(corpus.complete_rate, 100.0);
        assert_eq!(round1(94.555), 94.6);
        assert_eq!(percent(52, 271), 19.2);
        assert_eq!(percent(87, 229), 38.0);
    }

    proptest! {
        #[test]
        fn adding_a_table_never_decreases_counts(
            sizes in prop::collection::vec((0usize..6, 1usize..6), 0..5),
            extra in (0usize..6, 1usize..6),
        ) {
            let vocab = MissingVocab::default();
            let mut tables: Vec<WikiTable> = sizes.iter().enumerate().map(|(i, (r, c))| sized(*r, *c, i)).collect();
            let article = ArticleRef::new("en", "T").unwrap();
            let before = page_stats(&PageInput { article: article.clone(), tables: &tables, reference_count: 0, main_table_override: None }, &vocab, true);
            tables.push(sized(extra.0, extra.1, tables.len()));
            let after = page_stats(&PageInput { article, tables: &tables, reference_count: 0, main_table_override: None }, &vocab, true);
            prop_assert!(after.table_count > before.table_count);
            // The main table may change to a narrower one; counts over all
            // tables only grow.
            prop_assert!(after.all_tables_columns.unwrap().total >= before.all_tables_columns.unwrap().total);
            prop_assert_eq!(after.complete_columns + after.incomplete_columns, after.total_columns);
        }
    }
}
