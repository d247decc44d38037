use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::parse::{parse_value, ParsedValue, ValueKind};
use super::{
    CellValue, Evidence, InconsistencyClass, InconsistencyRecord, MissingVocab, RecordScope,
};
use crate::entity_align::{surface_key, AlignedMatrix, EntityKey, EntityRow};
use crate::schema_align::MappedAttribute;
use crate::table_parser::WikiTable;

/// Percentage points a ratio may differ from a stated percentage before the
/// two disagree (stated percentages are rounded to one decimal).
pub const RATIO_ROUNDING_SLACK_PP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
enum Dimension {
    /// Unitless number: takes the unit of whatever it is compared with.
    Any,
    Percent,
    Length,
    Area,
    Volume,
    Unknown(String),
}

/// A numeric value converted to the base unit of its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    dimension: Dimension,
    pub value: f64,
    from_ratio: bool,
}

impl Quantity {
    pub fn of(value: &ParsedValue) -> Option<Quantity> {
        let magnitude = value.magnitude?;
        let (dimension, value_in_base) = match value.kind {
            ValueKind::Text => return None,
            ValueKind::Percentage | ValueKind::Ratio => (Dimension::Percent, magnitude),
            ValueKind::Number => match value.unit.as_deref() {
                None => (Dimension::Any, magnitude),
                Some("m") => (Dimension::Length, magnitude),
                Some("ft") => (Dimension::Length, magnitude * 0.3048),
                Some("km") => (Dimension::Length, magnitude * 1000.0),
                Some("mi") => (Dimension::Length, magnitude * 1609.344),
                Some("km2") => (Dimension::Area, magnitude),
                Some("m2") => (Dimension::Area, magnitude / 1e6),
                Some("mi2") => (Dimension::Area, magnitude * 2.589_988_110_336),
                Some("km3") => (Dimension::Volume, magnitude),
                Some(other) => (Dimension::Unknown(other.to_string()), magnitude),
            },
        };
        Some(Quantity {
            dimension,
            value: value_in_base,
            from_ratio: value.kind == ValueKind::Ratio,
        })
    }

    fn comparable(&self, other: &Quantity) -> bool {
        self.dimension == other.dimension
            || self.dimension == Dimension::Any
            || other.dimension == Dimension::Any
    }
}

/// Relative difference `|a - b| / min(|a|, |b|)`, or `None` when the units
/// cannot be compared. Zero against non-zero counts as 1. A ratio within
/// [`RATIO_ROUNDING_SLACK_PP`] of a percentage counts as equal.
pub fn pair_difference(a: &Quantity, b: &Quantity) -> Option<f64> {
    if !a.comparable(b) {
        return None;
    }
    let diff = (a.value - b.value).abs();
    if (a.from_ratio || b.from_ratio)
        && a.dimension == Dimension::Percent
        && b.dimension == Dimension::Percent
        && diff <= RATIO_ROUNDING_SLACK_PP + 1e-9
    {
        return Some(0.0);
    }
    if diff == 0.0 {
        return Some(0.0);
    }
    let smaller = a.value.abs().min(b.value.abs());
    if smaller == 0.0 {
        return Some(1.0);
    }
    Some(diff / smaller)
}

/// The inputs value comparison needs for one article family.
pub struct FamilyView<'a> {
    pub family: &'a str,
    pub matrix: &'a AlignedMatrix,
    /// Extracted tables per language, indexed by `table_index`.
    pub tables: &'a BTreeMap<String, Vec<WikiTable>>,
    /// Column attributes per language, per table.
    pub columns: &'a BTreeMap<String, Vec<Vec<MappedAttribute>>>,
    /// Entity column per (language, table index); never compared as a value.
    pub entity_columns: &'a BTreeMap<(String, usize), usize>,
    pub vocab: &'a MissingVocab,
}

impl FamilyView<'_> {
    /// First usable value of `attribute` per language, in occurrence order.
    /// A language whose matching cells are all missing maps to `Missing`;
    /// one without a matching column is left out.
    pub fn values_for(
        &self,
        row: &EntityRow,
        attribute: &MappedAttribute,
    ) -> BTreeMap<String, CellValue> {
        let mut out = BTreeMap::new();
        for (language, occurrences) in &row.occurrences {
            let (Some(tables), Some(columns)) =
                (self.tables.get(language), self.columns.get(language))
            else {
                continue;
            };
            let mut found: Option<CellValue> = None;
            'occ: for occ in occurrences {
                let (Some(table), Some(cols)) =
                    (tables.get(occ.table_index), columns.get(occ.table_index))
                else {
                    continue;
                };
                let entity_col = self
                    .entity_columns
                    .get(&(language.clone(), occ.table_index));
                for (col, attr) in cols.iter().enumerate() {
                    if attr != attribute || entity_col == Some(&col) {
                        continue;
                    }
                    let Some(cell) = table.body_rows.get(occ.row_index).map(|r| &r[col]) else {
                        continue;
                    };
                    if self.vocab.is_missing(&cell.text) {
                        found.get_or_insert(CellValue::Missing);
                        continue;
                    }
                    found = Some(CellValue::Parsed(parse_value(&cell.text, language)));
                    break 'occ;
                }
            }
            if let Some(value) = found {
                out.insert(language.clone(), value);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncomparableUnits {
    pub entity: EntityKey,
    pub attribute: MappedAttribute,
    /// Unit per language (`"-"` for unitless, `"%"` for percentages).
    pub units: BTreeMap<String, String>,
}

/// Text values that differ across editions; informational, no class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextDivergence {
    pub entity: EntityKey,
    pub attribute: MappedAttribute,
    pub values: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConflictScan {
    pub records: Vec<InconsistencyRecord>,
    pub incomparable: Vec<IncomparableUnits>,
    pub text_divergences: Vec<TextDivergence>,
}

fn unit_label(value: &ParsedValue) -> String {
    match value.kind {
        ValueKind::Percentage | ValueKind::Ratio => "%".into(),
        _ => value.unit.clone().unwrap_or_else(|| "-".into()),
    }
}

/// Numeric disagreements on one attribute.
///
/// Every entity with numeric values in at least two languages is compared
/// pairwise; it is reported when the largest relative difference exceeds
/// `rel_tol`. Records start out as invalidity candidates; [`super::classify`]
/// refines that.
pub fn detect_conflicts(
    view: &FamilyView,
    attribute: &MappedAttribute,
    rel_tol: f64,
) -> ConflictScan {
    let mut scan = ConflictScan::default();
    for row in &view.matrix.entities {
        let values = view.values_for(row, attribute);
        let numeric: BTreeMap<&String, (&ParsedValue, Quantity)> = values
            .iter()
            .filter_map(|(lang, v)| {
                let parsed = v.parsed()?;
                Some((lang, (parsed, Quantity::of(parsed)?)))
            })
            .collect();

        let texts: BTreeMap<String, String> = values
            .iter()
            .filter_map(|(lang, v)| {
                v.parsed()
                    .filter(|p| !p.is_numeric())
                    .map(|p| (lang.clone(), p.original.clone()))
            })
            .collect();
        if numeric.is_empty() && texts.len() >= 2 {
            let mut keys: Vec<String> = texts.values().map(|t| surface_key(t)).collect();
            keys.sort();
            keys.dedup();
            if keys.len() > 1 {
                scan.text_divergences.push(TextDivergence {
                    entity: row.key.clone(),
                    attribute: attribute.clone(),
                    values: texts,
                });
            }
        }

        if numeric.len() < 2 {
            continue;
        }
        let entries: Vec<_> = numeric.iter().collect();
        let mut max_diff: Option<f64> = None;
        let mut incomparable = false;
        for (i, (_, (_, qa))) in entries.iter().enumerate() {
            for (_, (_, qb)) in &entries[i + 1..] {
                match pair_difference(qa, qb) {
                    Some(d) => max_diff = Some(max_diff.map_or(d, |m: f64| m.max(d))),
                    None => incomparable = true,
                }
            }
        }
        if incomparable {
            scan.incomparable.push(IncomparableUnits {
                entity: row.key.clone(),
                attribute: attribute.clone(),
                units: numeric
                    .iter()
                    .map(|(l, (p, _))| ((*l).clone(), unit_label(p)))
                    .collect(),
            });
        }
        let Some(severity) = max_diff else { continue };
        if severity > rel_tol {
            scan.records.push(InconsistencyRecord {
                family: view.family.to_string(),
                scope: RecordScope::Value,
                entity: Some(row.key.clone()),
                attribute: Some(attribute.clone()),
                class: InconsistencyClass::InvalidityCandidate,
                values: numeric
                    .iter()
                    .map(|(l, (p, _))| ((*l).clone(), CellValue::Parsed((*p).clone())))
                    .collect(),
                evidence: Evidence {
                    rationale: format!(
                        "values disagree by up to {:.4} (relative), tolerance {rel_tol}",
                        severity
                    ),
                    revisions: BTreeMap::new(),
                },
                severity: Some(severity),
            });
        }
    }
    scan
}
