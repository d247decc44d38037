//! Exhaustive pairwise item matcher over the fixture tables.

use std::collections::{BTreeMap, BTreeSet};

use tablediff::entity_align::{
    extract_row_entities, link_mentions, AlignedMatrix, EntityKey, EntityMention,
};
use tablediff::pipeline::prepare_family;
use tablediff::report::Settings;

pub type Families = BTreeMap<String, (Vec<String>, BTreeMap<String, Vec<EntityMention>>)>;

pub const MAX_ROWS: usize = 10;

pub type Site = (String, usize, usize);

/// Linked mentions from fixture tables with at most `MAX_ROWS` body rows,
/// keyed by family id.
pub fn small_table_mentions() -> Families {
    let manifest = super::manifest("geography.json");
    let client = super::offline_client();
    let mapping = super::mapping();
    let mut out = BTreeMap::new();
    for spec in &manifest.families {
        let Ok(prepared) = prepare_family(spec, &Settings::default(), &client, &mapping) else {
            continue;
        };
        let mut mentions = BTreeMap::new();
        for (lang, tables) in &prepared.tables {
            let mut list = Vec::new();
            for table in tables.iter().filter(|t| t.body_rows.len() <= MAX_ROWS) {
                if let Ok(rows) = extract_row_entities(table, None) {
                    list.extend(rows.mentions);
                }
            }
            mentions.insert(lang.clone(), link_mentions(list, lang, &client).unwrap());
        }
        out.insert(spec.id.clone(), (prepared.languages.clone(), mentions));
    }
    out
}

pub fn site(lang: &str, m: &EntityMention) -> Site {
    (lang.to_string(), m.table.table_index, m.row_index)
}

/// Pairs of sites that share an item, by comparing every mention with every other.
pub fn oracle_pairs(mentions: &BTreeMap<String, Vec<EntityMention>>) -> BTreeSet<(Site, Site)> {
    let flat: Vec<(Site, &EntityMention)> = mentions
        .iter()
        .flat_map(|(l, ms)| ms.iter().map(move |m| (site(l, m), m)))
        .collect();
    let mut pairs = BTreeSet::new();
    for (a, ma) in &flat {
        for (b, mb) in &flat {
            if a != b && ma.qid.is_some() && ma.qid == mb.qid {
                pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    pairs
}

pub fn matrix_pairs(matrix: &AlignedMatrix) -> BTreeSet<(Site, Site)> {
    let mut pairs = BTreeSet::new();
    for row in matrix
        .entities
        .iter()
        .filter(|e| matches!(e.key, EntityKey::Item(_)))
    {
        let sites: Vec<Site> = row
            .occurrences
            .iter()
            .flat_map(|(l, occ)| {
                occ.iter()
                    .map(move |o| (l.clone(), o.table_index, o.row_index))
            })
            .collect();
        for a in &sites {
            for b in &sites {
                if a != b {
                    pairs.insert((a.clone(), b.clone()));
                }
            }
        }
    }
    pairs
}

/// Entity keys with their (table, row) occurrences per language.
pub type Shape = Vec<(EntityKey, Vec<(String, Vec<(usize, usize)>)>)>;

pub fn shape(matrix: &AlignedMatrix) -> Shape {
    matrix
        .entities
        .iter()
        .map(|e| {
            let occ = e
                .occurrences
                .iter()
                .map(|(l, os)| {
                    (
                        l.clone(),
                        os.iter().map(|o| (o.table_index, o.row_index)).collect(),
                    )
                })
                .collect();
            (e.key.clone(), occ)
        })
        .collect()
}

pub fn small_table_mentions_cached() -> &'static Families {
    static CACHE: std::sync::OnceLock<Families> = std::sync::OnceLock::new();
    CACHE.get_or_init(small_table_mentions)
}
