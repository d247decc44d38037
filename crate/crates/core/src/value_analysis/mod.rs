//! Value-level comparison of aligned rows and the three-way classification
//! of cross-language inconsistencies.

mod classify;
mod conflicts;
mod incompleteness;
mod parse;

pub use classify::{classify, DEFAULT_STALENESS_DAYS};
pub use conflicts::{
    detect_conflicts, pair_difference, ConflictScan, FamilyView, IncomparableUnits, Quantity,
    TextDivergence, RATIO_ROUNDING_SLACK_PP,
};
pub use incompleteness::detect_incompleteness;
pub use parse::{
    canonical_unit, format_number, number_locale, parse_locale_number, parse_value, NumberLocale,
    ParsedValue, ValueKind,
};

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::entity_align::EntityKey;
use crate::schema_align::MappedAttribute;

/// Cell texts that mean "no value".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingVocab {
    tokens: BTreeSet<String>,
}

impl Default for MissingVocab {
    fn default() -> Self {
        MissingVocab {
            tokens: ["", "—", "–", "-", "N/A", "n/a", "?"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl MissingVocab {
    pub fn with_extra<I, S>(extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = MissingVocab::default();
        vocab
            .tokens
            .extend(extra.into_iter().map(|s| s.into().trim().to_string()));
        vocab
    }

    pub fn is_missing(&self, text: &str) -> bool {
        self.tokens.contains(text.trim())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellValue {
    Parsed(ParsedValue),
    Missing,
}

impl CellValue {
    pub fn parsed(&self) -> Option<&ParsedValue> {
        match self {
            CellValue::Parsed(v) => Some(v),
            CellValue::Missing => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InconsistencyClass {
    InvalidityCandidate,
    TimelinessCandidate,
    Incompleteness,
}

impl InconsistencyClass {
    pub fn as_str(self) -> &'static str {
        match self {
            InconsistencyClass::InvalidityCandidate => "invalidity-candidate",
            InconsistencyClass::TimelinessCandidate => "timeliness-candidate",
            InconsistencyClass::Incompleteness => "incompleteness",
        }
    }
}

/// What a record is about: one value of one entity, a column missing from
/// an edition, or a row missing from an edition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordScope {
    Value,
    Schema,
    Row,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Evidence {
    pub rationale: String,
    /// Revision timestamps of the pages involved.
    pub revisions: BTreeMap<String, DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InconsistencyRecord {
    pub family: String,
    pub scope: RecordScope,
    /// Absent for schema-level records, which concern a whole column.
    pub entity: Option<EntityKey>,
    /// Absent for row-level records, which concern a whole row.
    pub attribute: Option<MappedAttribute>,
    pub class: InconsistencyClass,
    pub values: BTreeMap<String, CellValue>,
    pub evidence: Evidence,
    /// Largest pairwise relative difference; value records only.
    pub severity: Option<f64>,
}

#[cfg(test)]
mod tests;
