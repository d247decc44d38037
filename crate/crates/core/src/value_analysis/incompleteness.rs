use std::collections::BTreeMap;

use chrono::{DateTime, Utc};

use super::{Evidence, InconsistencyClass, InconsistencyRecord, RecordScope};
use crate::entity_align::{AlignedMatrix, EntityKey};
use crate::schema_align::PresenceGrid;

/// Incompleteness records for one family.
///
/// Schema level: one record per attribute absent from an edition's main
/// table. Row level: one record per linked entity absent from an edition
/// that has rows at all. Unlinked rows are never reported missing since
/// their identity across languages is unknown.
pub fn detect_incompleteness(
    grid: &PresenceGrid,
    matrix: &AlignedMatrix,
    revisions: &BTreeMap<String, DateTime<Utc>>,
) -> Vec<InconsistencyRecord> {
    let mut records = Vec::new();
    let pick = |langs: &[&str]| -> BTreeMap<String, DateTime<Utc>> {
        langs
            .iter()
            .filter_map(|l| revisions.get(*l).map(|t| (l.to_string(), *t)))
            .collect()
    };

    for (attribute, row) in grid.attributes.iter().zip(&grid.present) {
        let holders: Vec<&str> = grid
            .languages
            .iter()
            .zip(row)
            .filter(|(_, p)| **p)
            .map(|(l, _)| l.as_str())
            .collect();
        for (language, present) in grid.languages.iter().zip(row) {
            if *present {
                continue;
            }
            records.push(InconsistencyRecord {
                family: grid.family.clone(),
                scope: RecordScope::Schema,
                entity: None,
                attribute: Some(attribute.clone()),
                class: InconsistencyClass::Incompleteness,
                values: BTreeMap::new(),
                evidence: Evidence {
                    rationale: format!(
                        "column {attribute} missing from {language}; present in [{}]",
                        holders.join(", ")
                    ),
                    revisions: pick(&[language.as_str()]),
                },
                severity: None,
            });
        }
    }

    let active: Vec<&String> = matrix
        .languages
        .iter()
        .filter(|l| matrix.occurrence_count(l) > 0)
        .collect();
    for entity in &matrix.entities {
        if !matches!(entity.key, EntityKey::Item(_)) {
            continue;
        }
        let holders: Vec<&str> = entity.occurrences.keys().map(String::as_str).collect();
        for language in &active {
            if entity
                .occurrences
                .get(*language)
                .is_some_and(|o| !o.is_empty())
            {
                continue;
            }
            let label = entity.labels.values().next().cloned().unwrap_or_default();
            records.push(InconsistencyRecord {
                family: matrix.family.clone(),
                scope: RecordScope::Row,
                entity: Some(entity.key.clone()),
                attribute: None,
                class: InconsistencyClass::Incompleteness,
                values: BTreeMap::new(),
                evidence: Evidence {
                    rationale: format!(
                        "row {} ({label}) missing from {language}; present in [{}]",
                        entity.key,
                        holders.join(", ")
                    ),
                    revisions: pick(&[language.as_str()]),
                },
                severity: None,
            });
        }
    }
    records
}
