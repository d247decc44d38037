//! fetch → extract → link → align → analyze, for every family of a manifest.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use log::{info, warn};
use rayon::prelude::*;

use crate::entity_align::AlignedMatrix;
use crate::entity_align::{
    build_matrix, extract_row_entities, link_mentions, AlignError, EntityMention,
};
use crate::manifest::{DatasetManifest, FamilySpec, LanguageSelection};
use crate::metrics::{compute_family_stats, select_main_table, FamilyStats, PageInput};
use crate::mw_client::{count_references, ArticleRef, ClientError, MwClient, PageDocument};
use crate::report::{
    Edition, EditionStatus, FamilyReport, FamilyStatus, Finding, FindingKind, Report, Settings,
};
use crate::schema_align::{
    build_presence_grid, map_columns, HeaderMapping, MappedAttribute, PresenceGrid,
};
use crate::table_parser::{extract_tables, WikiTable};
use crate::value_analysis::{
    classify, detect_conflicts, detect_incompleteness, FamilyView, MissingVocab,
};

/// Runs every family of `manifest` and assembles the report. Families are
/// processed in parallel up to `settings.jobs`; the report keeps manifest
/// order.
pub fn run_pipeline(
    manifest: &DatasetManifest,
    settings: &Settings,
    client: &MwClient,
    mapping: &HeaderMapping,
) -> Report {
    let vocab = MissingVocab::with_extra(settings.missing_tokens.iter().cloned());
    let run = || -> Vec<FamilyReport> {
        manifest
            .families
            .par_iter()
            .map(|spec| analyze_family(spec, settings, client, mapping, &vocab))
            .collect()
    };
    let families = match rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(e) => {
            warn!("cannot build worker pool ({e}); using the global one");
            run()
        }
    };
    Report::new(manifest.clone(), settings.clone(), families)
}

/// Outcome of loading one requested edition.
type EditionLoad = (
    String,
    Option<ArticleRef>,
    Result<LoadedPage, ClientError>,
    Vec<Finding>,
);

/// Linked mentions, entity column per table, and findings of one edition.
type EditionMentions = (
    String,
    Vec<EntityMention>,
    BTreeMap<usize, usize>,
    Vec<Finding>,
);

struct LoadedPage {
    doc: PageDocument,
    tables: Vec<WikiTable>,
    references: usize,
}

fn selected_languages(
    spec: &FamilySpec,
    settings: &Settings,
    editions: &[ArticleRef],
) -> Vec<String> {
    if let Some(list) = &settings.languages {
        return list.clone();
    }
    match &spec.languages {
        LanguageSelection::Listed(list) => list.clone(),
        LanguageSelection::All(_) => editions.iter().map(|e| e.language.clone()).collect(),
    }
}

fn failed(spec: &FamilySpec, findings: Vec<Finding>) -> FamilyReport {
    FamilyReport {
        id: spec.id.clone(),
        seed: spec.seed.clone(),
        status: FamilyStatus::Failed,
        editions: Vec::new(),
        stats: FamilyStats::new(&spec.id, BTreeMap::new()),
        grid: PresenceGrid {
            family: spec.id.clone(),
            attributes: Vec::new(),
            languages: Vec::new(),
            present: Vec::new(),
        },
        matrix: AlignedMatrix {
            family: spec.id.clone(),
            languages: Vec::new(),
            entities: Vec::new(),
        },
        records: Vec::new(),
        findings,
    }
}

fn load_page(
    client: &MwClient,
    article: &ArticleRef,
    findings: &mut Vec<Finding>,
) -> Result<LoadedPage, ClientError> {
    let doc = client.fetch_page(article, client.default_policy())?;
    let lang = Some(article.language.as_str());
    let tables = extract_tables(&doc).unwrap_or_else(|e| {
        findings.push(Finding::new(FindingKind::ParseError, lang, e.to_string()));
        Vec::new()
    });
    let references = count_references(&doc).unwrap_or_else(|e| {
        findings.push(Finding::new(FindingKind::ParseError, lang, e.to_string()));
        0
    });
    Ok(LoadedPage {
        doc,
        tables,
        references,
    })
}

/// Everything loaded for one family before value analysis: parsed tables,
/// column attributes, entity columns and the aligned matrix.
pub struct PreparedFamily {
    pub id: String,
    /// Languages with a loaded page, in requested order.
    pub languages: Vec<String>,
    pub editions: Vec<Edition>,
    pub tables: BTreeMap<String, Vec<WikiTable>>,
    pub references: BTreeMap<String, usize>,
    pub documents: BTreeMap<String, ArticleRef>,
    pub columns: BTreeMap<String, Vec<Vec<MappedAttribute>>>,
    pub entity_columns: BTreeMap<(String, usize), usize>,
    pub matrix: AlignedMatrix,
    pub revisions: BTreeMap<String, DateTime<Utc>>,
    pub findings: Vec<Finding>,
    /// Some requested edition could not be loaded.
    pub degraded: bool,
}

impl PreparedFamily {
    pub fn view<'a>(&'a self, vocab: &'a MissingVocab) -> FamilyView<'a> {
        FamilyView {
            family: &self.id,
            matrix: &self.matrix,
            tables: &self.tables,
            columns: &self.columns,
            entity_columns: &self.entity_columns,
            vocab,
        }
    }

    /// Main table per language, honoring the manifest override.
    pub fn main_tables(&self, spec: &FamilySpec) -> BTreeMap<String, &WikiTable> {
        self.tables
            .iter()
            .filter_map(|(l, ts)| {
                let index = select_main_table(ts, spec.overrides.main_table_index.get(l).copied())?;
                Some((l.clone(), &ts[index]))
            })
            .collect()
    }

    /// Recomputes column attributes, e.g. after tables were edited.
    pub fn remap(&mut self, mapping: &HeaderMapping) {
        self.columns = self
            .tables
            .iter()
            .map(|(l, ts)| {
                (
                    l.clone(),
                    ts.iter().map(|t| map_columns(t, mapping)).collect(),
                )
            })
            .collect();
    }
}

/// Fetches, parses and aligns one family. Fails with the findings that
/// explain why when no page could be loaded.
pub fn prepare_family(
    spec: &FamilySpec,
    settings: &Settings,
    client: &MwClient,
    mapping: &HeaderMapping,
) -> Result<PreparedFamily, (Vec<Edition>, Vec<Finding>)> {
    let editions = match client.list_language_versions(&spec.seed) {
        Ok(e) => e,
        Err(e) => {
            warn!("family {}: {e}", spec.id);
            return Err((
                Vec::new(),
                vec![Finding::new(
                    FindingKind::LanguageLinks,
                    Some(&spec.seed.language),
                    e.to_string(),
                )],
            ));
        }
    };
    let languages = selected_languages(spec, settings, &editions);

    // Fetch and parse every requested edition.
    let loaded: Vec<EditionLoad> = languages
        .par_iter()
        .map(|lang| {
            let mut findings = Vec::new();
            let Some(article) = editions.iter().find(|e| &e.language == lang).cloned() else {
                return (
                    lang.clone(),
                    None,
                    Err(ClientError::PageMissing(spec.seed.clone())),
                    findings,
                );
            };
            let page = load_page(client, &article, &mut findings);
            (lang.clone(), Some(article), page, findings)
        })
        .collect();

    let mut findings = Vec::new();
    let mut edition_rows = Vec::new();
    let mut pages: BTreeMap<String, LoadedPage> = BTreeMap::new();
    let mut degraded = false;
    for (lang, article, page, page_findings) in loaded {
        findings.extend(page_findings);
        let title = article.as_ref().map(|a| a.title.clone());
        let mut edition = Edition {
            language: lang.clone(),
            title,
            status: EditionStatus::Present,
            revision_id: None,
            revision_timestamp: None,
            fetched_at: None,
        };
        match page {
            Ok(p) => {
                edition.revision_id = Some(p.doc.revision_id);
                edition.revision_timestamp = Some(p.doc.revision_timestamp);
                edition.fetched_at = Some(p.doc.fetched_at);
                pages.insert(lang.clone(), p);
            }
            Err(ClientError::PageMissing(_)) => {
                edition.status = EditionStatus::Absent;
                let detail = match &article {
                    Some(a) => format!("{a} does not exist"),
                    None => format!("no {lang} edition of {}", spec.seed),
                };
                findings.push(Finding::new(FindingKind::PageMissing, Some(&lang), detail));
            }
            Err(e @ ClientError::CacheMiss(_)) => {
                degraded = true;
                edition.status = EditionStatus::Unavailable;
                findings.push(Finding::new(
                    FindingKind::Unavailable,
                    Some(&lang),
                    e.to_string(),
                ));
            }
            Err(e) => {
                degraded = true;
                edition.status = EditionStatus::Error;
                findings.push(Finding::new(
                    FindingKind::FetchError,
                    Some(&lang),
                    e.to_string(),
                ));
            }
        }
        edition_rows.push(edition);
    }
    if pages.is_empty() {
        return Err((edition_rows, findings));
    }
    let present: Vec<String> = languages
        .iter()
        .filter(|l| pages.contains_key(*l))
        .cloned()
        .collect();

    // Row entities of every table, linked to Wikidata items.
    let linked: Vec<EditionMentions> = present
        .par_iter()
        .map(|lang| {
            let page = &pages[lang];
            let hints = spec.overrides.column_hint.get(lang);
            let mut local = Vec::new();
            let mut columns = BTreeMap::new();
            let mut mentions = Vec::new();
            for table in &page.tables {
                let hint = hints.and_then(|h| h.get(&table.table_index)).copied();
                match extract_row_entities(table, hint) {
                    Ok(rows) => {
                        columns.insert(table.table_index, rows.column);
                        mentions.extend(rows.mentions);
                    }
                    Err(e) => {
                        let kind = match e {
                            AlignError::NoEntityColumn(_) => FindingKind::NoEntityColumn,
                            AlignError::HintOutOfRange { .. } => FindingKind::HintOutOfRange,
                        };
                        let mut finding = Finding::new(kind, Some(lang), e.to_string());
                        finding.table_index = Some(table.table_index);
                        local.push(finding);
                    }
                }
            }
            let mentions = match link_mentions(mentions.clone(), lang, client) {
                Ok(m) => m,
                Err(e) => {
                    local.push(Finding::new(
                        FindingKind::LinkingFailed,
                        Some(lang),
                        e.to_string(),
                    ));
                    mentions
                }
            };
            (lang.clone(), mentions, columns, local)
        })
        .collect();

    let mut mentions = BTreeMap::new();
    let mut entity_columns = BTreeMap::new();
    for (lang, list, columns, local) in linked {
        findings.extend(local);
        for (table, column) in columns {
            entity_columns.insert((lang.clone(), table), column);
        }
        mentions.insert(lang, list);
    }
    let matrix = build_matrix(&spec.id, &present, &mentions);

    let tables: BTreeMap<String, Vec<WikiTable>> = pages
        .iter()
        .map(|(l, p)| (l.clone(), p.tables.clone()))
        .collect();
    let mut prepared = PreparedFamily {
        id: spec.id.clone(),
        languages: present,
        editions: edition_rows,
        references: pages
            .iter()
            .map(|(l, p)| (l.clone(), p.references))
            .collect(),
        documents: pages
            .iter()
            .map(|(l, p)| (l.clone(), p.doc.article.clone()))
            .collect(),
        revisions: pages
            .iter()
            .map(|(l, p)| (l.clone(), p.doc.revision_timestamp))
            .collect(),
        tables,
        columns: BTreeMap::new(),
        entity_columns,
        matrix,
        findings,
        degraded,
    };
    prepared.remap(mapping);
    Ok(prepared)
}

fn analyze_family(
    spec: &FamilySpec,
    settings: &Settings,
    client: &MwClient,
    mapping: &HeaderMapping,
    vocab: &MissingVocab,
) -> FamilyReport {
    info!("analyzing family {}", spec.id);
    let mut family = match prepare_family(spec, settings, client, mapping) {
        Ok(f) => f,
        Err((editions, findings)) => {
            let mut report = failed(spec, findings);
            report.editions = editions;
            return report;
        }
    };
    let grid = build_presence_grid(
        &spec.id,
        &family.languages,
        &family.main_tables(spec),
        mapping,
    );
    let view = family.view(vocab);
    let revisions = &family.revisions;
    let mut findings = Vec::new();
    let mut records = Vec::new();
    for attribute in grid.attributes.iter().filter(|a| a.canonical().is_some()) {
        let scan = detect_conflicts(&view, attribute, settings.rel_tol);
        records.extend(
            scan.records
                .iter()
                .map(|r| classify(r, revisions, settings.rel_tol, settings.staleness_days)),
        );
        for x in scan.incomparable {
            let units = x
                .units
                .iter()
                .map(|(l, u)| format!("{l}={u}"))
                .collect::<Vec<_>>()
                .join(", ");
            findings.push(Finding {
                kind: FindingKind::IncomparableUnits,
                language: None,
                table_index: None,
                entity: Some(x.entity),
                attribute: Some(x.attribute),
                detail: format!("units cannot be compared: {units}"),
            });
        }
        for x in scan.text_divergences {
            let values = x
                .values
                .iter()
                .map(|(l, v)| format!("{l}={v}"))
                .collect::<Vec<_>>()
                .join("; ");
            findings.push(Finding {
                kind: FindingKind::TextDivergence,
                language: None,
                table_index: None,
                entity: Some(x.entity),
                attribute: Some(x.attribute),
                detail: values,
            });
        }
    }
    records.extend(detect_incompleteness(&grid, &family.matrix, revisions));

    let inputs: BTreeMap<String, PageInput> = family
        .tables
        .iter()
        .map(|(l, ts)| {
            (
                l.clone(),
                PageInput {
                    article: family.documents[l].clone(),
                    tables: ts,
                    reference_count: family.references[l],
                    main_table_override: spec.overrides.main_table_index.get(l).copied(),
                },
            )
        })
        .collect();
    let stats = compute_family_stats(&spec.id, &inputs, vocab, settings.all_tables);

    let mut all_findings = std::mem::take(&mut family.findings);
    all_findings.extend(findings);
    FamilyReport {
        id: spec.id.clone(),
        seed: spec.seed.clone(),
        status: if family.degraded {
            FamilyStatus::Partial
        } else {
            FamilyStatus::Complete
        },
        editions: family.editions,
        stats,
        grid,
        matrix: family.matrix,
        records,
        findings: all_findings,
    }
}
