//! Conflict counts over the Eight-thousander family with rewritten height cells.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use tablediff::metrics::select_main_table;
use tablediff::pipeline::{prepare_family, PreparedFamily};
use tablediff::report::Settings;
use tablediff::schema_align::MappedAttribute;
use tablediff::table_parser::{Cell, WikiTable};
use tablediff::value_analysis::{detect_conflicts, FamilyView, MissingVocab};

pub fn eight_thousander() -> &'static PreparedFamily {
    static PREPARED: OnceLock<PreparedFamily> = OnceLock::new();
    PREPARED.get_or_init(|| {
        let manifest = super::manifest("geography.json");
        let spec = manifest
            .families
            .iter()
            .find(|f| f.id == "eight_thousander")
            .unwrap();
        prepare_family(
            spec,
            &Settings::default(),
            &super::offline_client(),
            &super::mapping(),
        )
        .unwrap()
    })
}

/// Main tables with every `height` cell replaced by the next value from `values`.
pub fn perturbed(prepared: &PreparedFamily, values: &[u32]) -> BTreeMap<String, Vec<WikiTable>> {
    let height = MappedAttribute::Known("height".into());
    let mut tables = prepared.tables.clone();
    let mut next = values.iter().cycle();
    for (lang, list) in tables.iter_mut() {
        let Some(main) = select_main_table(list, None) else {
            continue;
        };
        let Some(col) = prepared.columns[lang][main]
            .iter()
            .position(|a| a == &height)
        else {
            continue;
        };
        for row in &mut list[main].body_rows {
            row[col] = Cell::plain(&next.next().unwrap().to_string());
        }
    }
    tables
}

pub fn conflict_count(
    prepared: &PreparedFamily,
    tables: &BTreeMap<String, Vec<WikiTable>>,
    rel_tol: f64,
) -> usize {
    let vocab = MissingVocab::default();
    let view = FamilyView {
        family: &prepared.id,
        matrix: &prepared.matrix,
        tables,
        columns: &prepared.columns,
        entity_columns: &prepared.entity_columns,
        vocab: &vocab,
    };
    detect_conflicts(&view, &MappedAttribute::Known("height".into()), rel_tol)
        .records
        .len()
}
