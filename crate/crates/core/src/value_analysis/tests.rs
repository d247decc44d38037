use std::collections::BTreeMap;

use chrono::{DateTime, TimeZone, Utc};

use super::*;
use crate::entity_align::{build_matrix, extract_row_entities, AlignedMatrix, EntityMention};
use crate::mw_client::{ArticleRef, Qid};
use crate::schema_align::{build_presence_grid, map_columns, HeaderMapping};
use crate::table_parser::{Cell, WikiTable};

fn mapping() -> HeaderMapping {
    HeaderMapping::from_json(
        r#"{"attributes": [
            {"canonical": "name", "aliases": {"en": ["Mountain"], "de": ["Berg"], "zh": ["山峰"], "it": ["Montagna"]}},
            {"canonical": "death_rate", "aliases": {"zh": ["死亡率"], "it": ["Tasso di mortalità"], "de": ["Tote / Besteigungen"]}},
            {"canonical": "height", "aliases": {"en": ["Height"], "de": ["Höhe"], "zh": ["海拔"], "it": ["Altezza"]}}
        ]}"#,
    )
    .unwrap()
}

fn qid(n: u64) -> Qid {
    Qid::new(n).unwrap()
}

/// Table of (linked name, value) rows under the given headers.
fn table(lang: &str, headers: [&str; 2], rows: &[(&str, &str)]) -> WikiTable {
    let mut grid = vec![vec![Cell::header(headers[0]), Cell::header(headers[1])]];
    for (name, value) in rows {
        grid.push(vec![Cell::linked(name, name), Cell::plain(value)]);
    }
    WikiTable::from_grid(ArticleRef::new(lang, "T").unwrap(), 0, None, grid).unwrap()
}

struct Family {
    matrix: AlignedMatrix,
    tables: BTreeMap<String, Vec<WikiTable>>,
    columns: BTreeMap<String, Vec<Vec<MappedAttribute>>>,
    entity_columns: BTreeMap<(String, usize), usize>,
}

fn family(tables: Vec<WikiTable>, qids: &BTreeMap<&str, u64>) -> Family {
    let mapping = mapping();
    let mut by_lang = BTreeMap::new();
    let mut columns = BTreeMap::new();
    let mut entity_columns = BTreeMap::new();
    let mut mentions: BTreeMap<String, Vec<EntityMention>> = BTreeMap::new();
    for t in tables {
        let lang = t.source.language.clone();
        let rows = extract_row_entities(&t, None).unwrap();
        entity_columns.insert((lang.clone(), 0), rows.column);
        let linked = rows
            .mentions
            .into_iter()
            .map(|mut m| {
                m.qid = m
                    .link_title
                    .as_deref()
                    .and_then(|t| qids.get(t))
                    .map(|n| qid(*n));
                m
            })
            .collect();
        mentions.insert(lang.clone(), linked);
        columns.insert(lang.clone(), vec![map_columns(&t, &mapping)]);
        by_lang.insert(lang, vec![t]);
    }
    let langs: Vec<String> = by_lang.keys().cloned().collect();
    Family {
        matrix: build_matrix("f", &langs, &mentions),
        tables: by_lang,
        columns,
        entity_columns,
    }
}

fn at(y: i32, m: u32, d: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, m, d, 0, 0, 0).unwrap()
}

fn scan(f: &Family, attribute: &str, rel_tol: f64) -> ConflictScan {
    let vocab = MissingVocab::default();
    let view = FamilyView {
        family: "f",
        matrix: &f.matrix,
        tables: &f.tables,
        columns: &f.columns,
        entity_columns: &f.entity_columns,
        vocab: &vocab,
    };
    detect_conflicts(&view, &MappedAttribute::Known(attribute.into()), rel_tol)
}

fn k2_family() -> Family {
    let qids = BTreeMap::from([("K2", 43512)]);
    family(
        vec![
            table("zh", ["山峰", "死亡率"], &[("K2", "29.5%")]),
            table(
                "it",
                ["Montagna", "Tasso di mortalità"],
                &[("K2", "26,5 %")],
            ),
            table("de", ["Berg", "Tote / Besteigungen"], &[("K2", "80/302")]),
        ],
        &qids,
    )
}

#[test]
fn ratio_matches_rounded_percentage() {
    let ratio = Quantity::of(&parse_value("80/302", "de")).unwrap();
    let pct = Quantity::of(&parse_value("26,5 %", "it")).unwrap();
    assert_eq!(pair_difference(&ratio, &pct), Some(0.0));
    let other = Quantity::of(&parse_value("29.5%", "zh")).unwrap();
    assert!(pair_difference(&ratio, &other).unwrap() > 0.1);
}

#[test]
fn units_convert_and_unitless_is_wildcard() {
    let m = Quantity::of(&parse_value("8,849 m", "en")).unwrap();
    let ft = Quantity::of(&parse_value("29,032 ft", "en")).unwrap();
    assert!(pair_difference(&m, &ft).unwrap() < 1e-4);
    let bare = Quantity::of(&parse_value("8849", "en")).unwrap();
    assert_eq!(pair_difference(&m, &bare), Some(0.0));
    let pct = Quantity::of(&parse_value("12%", "en")).unwrap();
    assert_eq!(pair_difference(&m, &pct), None);
    let zero = Quantity::of(&parse_value("0", "en")).unwrap();
    assert_eq!(pair_difference(&zero, &bare), Some(1.0));
}

#[test]
fn k2_conflict_is_reported_and_classified_invalid() {
    let f = k2_family();
    let result = scan(&f, "death_rate", 0.0);
    assert_eq!(result.records.len(), 1);
    let record = &result.records[0];
    assert_eq!(record.entity, Some(EntityKey::Item(qid(43512))));
    assert_eq!(record.values.keys().collect::<Vec<_>>(), ["de", "it", "zh"]);

    let revisions = BTreeMap::from([
        ("de".to_string(), at(2025, 5, 1)),
        ("it".to_string(), at(2025, 5, 3)),
        ("zh".to_string(), at(2025, 5, 5)),
    ]);
    let classified = classify(record, &revisions, 0.0, DEFAULT_STALENESS_DAYS);
    assert_eq!(classified.class, InconsistencyClass::InvalidityCandidate);
    assert!(classified.evidence.rationale.contains("majority [de, it]"));
    assert_eq!(classified.evidence.revisions.len(), 3);
}

#[test]
fn stale_minority_is_a_timeliness_candidate() {
    let qids = BTreeMap::from([("Everest", 513)]);
    let f = family(
        vec![
            table("en", ["Mountain", "Height"], &[("Everest", "8,849")]),
            table("de", ["Berg", "Höhe"], &[("Everest", "8.848")]),
            table("zh", ["山峰", "海拔"], &[("Everest", "8849")]),
        ],
        &qids,
    );
    let result = scan(&f, "height", 0.0);
    assert_eq!(result.records.len(), 1);
    let mut revisions = BTreeMap::from([
        ("en".to_string(), at(2025, 5, 1)),
        ("de".to_string(), at(2023, 9, 1)),
        ("zh".to_string(), at(2025, 4, 20)),
    ]);
    let record = &result.records[0];
    assert_eq!(
        classify(record, &revisions, 0.0, 180).class,
        InconsistencyClass::TimelinessCandidate
    );
    assert_eq!(
        classify(record, &revisions, 0.0, 100_000).class,
        InconsistencyClass::InvalidityCandidate
    );
    revisions.insert("de".into(), at(2025, 4, 1));
    assert_eq!(
        classify(record, &revisions, 0.0, 180).class,
        InconsistencyClass::InvalidityCandidate
    );

    assert!(scan(&f, "height", 0.001).records.is_empty());
}

#[test]
fn tied_groups_without_newer_side_stay_invalid() {
    let qids = BTreeMap::from([("Everest", 513)]);
    let f = family(
        vec![
            table("en", ["Mountain", "Height"], &[("Everest", "8,849")]),
            table("de", ["Berg", "Höhe"], &[("Everest", "8.848")]),
        ],
        &qids,
    );
    let record = &scan(&f, "height", 0.0).records[0];
    let same = BTreeMap::from([
        ("en".to_string(), at(2025, 1, 1)),
        ("de".to_string(), at(2025, 1, 1)),
    ]);
    let classified = classify(record, &same, 0.0, 180);
    assert_eq!(classified.class, InconsistencyClass::InvalidityCandidate);
    assert!(classified.evidence.rationale.contains("no majority"));

    // The newer side wins the tie, so an old minority is stale.
    let apart = BTreeMap::from([
        ("en".to_string(), at(2025, 1, 1)),
        ("de".to_string(), at(2023, 1, 1)),
    ]);
    assert_eq!(
        classify(record, &apart, 0.0, 180).class,
        InconsistencyClass::TimelinessCandidate
    );
}

#[test]
fn missing_tokens_and_text_values() {
    let qids = BTreeMap::from([("Everest", 513), ("Lhotse", 1000)]);
    let f = family(
        vec![
            table(
                "en",
                ["Mountain", "Height"],
                &[("Everest", "—"), ("Lhotse", "unknown")],
            ),
            table(
                "de",
                ["Berg", "Höhe"],
                &[("Everest", "8.848"), ("Lhotse", "unbekannt")],
            ),
        ],
        &qids,
    );
    let vocab = MissingVocab::default();
    let view = FamilyView {
        family: "f",
        matrix: &f.matrix,
        tables: &f.tables,
        columns: &f.columns,
        entity_columns: &f.entity_columns,
        vocab: &vocab,
    };
    let height = MappedAttribute::Known("height".into());
    let everest = f.matrix.entity(&EntityKey::Item(qid(513))).unwrap();
    let values = view.values_for(everest, &height);
    assert_eq!(values["en"], CellValue::Missing);
    let result = detect_conflicts(&view, &height, 0.0);
    assert!(result.records.is_empty());
    assert_eq!(result.text_divergences.len(), 1);
    assert!(MissingVocab::with_extra(["unknown"]).is_missing(" unknown "));
}

#[test]
fn incomparable_units_are_reported_not_flagged() {
    let qids = BTreeMap::from([("Everest", 513)]);
    let f = family(
        vec![
            table("en", ["Mountain", "Height"], &[("Everest", "12%")]),
            table("de", ["Berg", "Höhe"], &[("Everest", "8.848 m")]),
        ],
        &qids,
    );
    let result = scan(&f, "height", 0.0);
    assert!(result.records.is_empty());
    assert_eq!(result.incomparable.len(), 1);
    assert_eq!(result.incomparable[0].units["en"], "%");
}

#[test]
fn incompleteness_at_schema_and_row_level() {
    let qids = BTreeMap::from([("K2", 43512), ("Everest", 513)]);
    let f = family(
        vec![
            table(
                "en",
                ["Mountain", "Height"],
                &[("Everest", "8,849"), ("K2", "8,611"), ("Local hill", "100")],
            ),
            table("zh", ["山峰", "死亡率"], &[("K2", "29.5%")]),
        ],
        &qids,
    );
    let mains: BTreeMap<String, &WikiTable> =
        f.tables.iter().map(|(l, t)| (l.clone(), &t[0])).collect();
    let langs = vec!["en".to_string(), "zh".to_string()];
    let grid = build_presence_grid("f", &langs, &mains, &mapping());
    let records = detect_incompleteness(&grid, &f.matrix, &BTreeMap::new());
    let schema: Vec<_> = records
        .iter()
        .filter(|r| r.scope == RecordScope::Schema)
        .collect();
    let row: Vec<_> = records
        .iter()
        .filter(|r| r.scope == RecordScope::Row)
        .collect();
    assert_eq!(schema.len(), 2);
    assert_eq!(row.len(), 1);
    assert_eq!(row[0].entity, Some(EntityKey::Item(qid(513))));
    assert!(row[0].evidence.rationale.contains("missing from zh"));
    assert!(records
        .iter()
        .all(|r| r.class == InconsistencyClass::Incompleteness));
}

#[test]
fn record_serializes_with_string_keys() {
    let f = k2_family();
    let record = &scan(&f, "death_rate", 0.0).records[0];
    let json = serde_json::to_value(record).unwrap();
    assert_eq!(json["entity"], "Q43512");
    assert_eq!(json["class"], "invalidity-candidate");
    assert_eq!(json["scope"], "value");
    let back: InconsistencyRecord = serde_json::from_value(json).unwrap();
    assert_eq!(&back, record);
}
