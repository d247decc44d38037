//! Report model and its json, csv and plot-matrix renderings.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entity_align::{AlignedMatrix, EntityKey};
use crate::manifest::DatasetManifest;
use crate::metrics::{CorpusStats, FamilyStats};
use crate::mw_client::ArticleRef;
use crate::schema_align::{MappedAttribute, PresenceGrid};
use crate::value_analysis::{CellValue, InconsistencyRecord};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolved analysis settings, recorded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Restricts every family to these languages when set.
    pub languages: Option<Vec<String>>,
    pub rel_tol: f64,
    pub staleness_days: i64,
    pub header_map: Option<PathBuf>,
    pub jobs: usize,
    pub all_tables: bool,
    pub offline: bool,
    pub refresh: bool,
    pub missing_tokens: Vec<String>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            languages: None,
            rel_tol: 0.0,
            staleness_days: crate::value_analysis::DEFAULT_STALENESS_DAYS,
            header_map: None,
            jobs: 4,
            all_tables: false,
            offline: false,
            refresh: false,
            missing_tokens: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditionStatus {
    Present,
    /// The article does not exist in this language.
    Absent,
    /// Not cached and not fetched (offline run).
    Unavailable,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edition {
    pub language: String,
    pub title: Option<String>,
    pub status: EditionStatus,
    pub revision_id: Option<u64>,
    pub revision_timestamp: Option<DateTime<Utc>>,
    pub fetched_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyStatus {
    Complete,
    /// Analyzed, but some requested editions could not be loaded.
    Partial,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    LanguageLinks,
    PageMissing,
    Unavailable,
    FetchError,
    ParseError,
    NoEntityColumn,
    HintOutOfRange,
    LinkingFailed,
    IncomparableUnits,
    TextDivergence,
}

/// A problem or observation that is not an inconsistency record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<EntityKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<MappedAttribute>,
    pub detail: String,
}

impl Finding {
    pub fn new(kind: FindingKind, language: Option<&str>, detail: impl Into<String>) -> Self {
        Finding {
            kind,
            language: language.map(str::to_string),
            table_index: None,
            entity: None,
            attribute: None,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub id: String,
    pub seed: ArticleRef,
    pub status: FamilyStatus,
    pub editions: Vec<Edition>,
    pub stats: FamilyStats,
    pub grid: PresenceGrid,
    pub matrix: AlignedMatrix,
    pub records: Vec<InconsistencyRecord>,
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub generated_at: DateTime<Utc>,
    /// Latest fetch time among the pages analyzed.
    pub cache_epoch: Option<DateTime<Utc>>,
    pub manifest: DatasetManifest,
    pub settings: Settings,
    pub families: Vec<FamilyReport>,
    pub corpus: CorpusStats,
}

impl Report {
    pub fn new(manifest: DatasetManifest, settings: Settings, families: Vec<FamilyReport>) -> Self {
        let cache_epoch = families
            .iter()
            .flat_map(|f| f.editions.iter().filter_map(|e| e.fetched_at))
            .max();
        let corpus = CorpusStats::of(families.iter().map(|f| &f.stats));
        Report {
            tool_version: TOOL_VERSION.to_string(),
            generated_at: Utc::now(),
            cache_epoch,
            manifest,
            settings,
            families,
            corpus,
        }
    }

    /// 0 when every family was analyzed, 2 when any family failed outright.
    pub fn exit_code(&self) -> i32 {
        if self
            .families
            .iter()
            .any(|f| f.status == FamilyStatus::Failed)
        {
            2
        } else {
            0
        }
    }

    pub fn record_count(&self) -> usize {
        self.families.iter().map(|f| f.records.len()).sum()
    }

    pub fn family(&self, id: &str) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.id == id)
    }

    /// Languages in order of first appearance across families.
    pub fn languages(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for family in &self.families {
            for edition in &family.editions {
                if !out.contains(&edition.language) {
                    out.push(edition.language.clone());
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Plotdata,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "plotdata" => Ok(OutputFormat::Plotdata),
            other => Err(format!(
                "unknown format {other:?} (expected json, csv or plotdata)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), EmitError> {
    let csv_err = |source| EmitError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(|source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn opt<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Short human form of a cell value for csv output.
pub fn display_value(value: &CellValue) -> String {
    match value {
        CellValue::Missing => "(missing)".into(),
        CellValue::Parsed(p) => p.original.clone(),
    }
}

/// Writes the report in `format` under `out`, returning the files written.
///
/// * json: `report.json`
/// * csv: `stats.csv`, `records.csv`, `presence.csv`, `findings.csv`
/// * plotdata: `tables_by_language.csv`, `references_heatmap.csv` and one
///   `presence_{family}.csv` per family
pub fn emit(report: &Report, format: OutputFormat, out: &Path) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(out).map_err(|source| EmitError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    match format {
        OutputFormat::Json => {
            let path = out.join("report.json");
            fs::write(&path, report.to_json()).map_err(|source| EmitError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(vec![path])
        }
        OutputFormat::Csv => emit_csv(report, out),
        OutputFormat::Plotdata => emit_plotdata(report, out),
    }
}

pub const STATS_HEADER: &[&str] = &[
    "family",
    "language",
    "title",
    "table_count",
    "reference_count",
    "main_table_index",
    "total_columns",
    "complete_columns",
    "incomplete_columns",
];
pub const RECORDS_HEADER: &[&str] = &[
    "family",
    "scope",
    "class",
    "entity",
    "attribute",
    "severity",
    "values",
    "rationale",
];
pub const PRESENCE_HEADER: &[&str] = &["family", "attribute", "language", "present"];
pub const FINDINGS_HEADER: &[&str] = &[
    "family",
    "kind",
    "language",
    "table_index",
    "entity",
    "attribute",
    "detail",
];

fn emit_csv(report: &Report, out: &Path) -> Result<Vec<PathBuf>, EmitError> {
    let stats = out.join("stats.csv");
    write_csv(
        &stats,
        STATS_HEADER,
        report.families.iter().flat_map(|f| {
            f.stats.pages().map(move |p| {
                vec![
                    f.id.clone(),
                    p.article.language.clone(),
                    p.article.title.clone(),
                    p.table_count.to_string(),
                    p.reference_count.to_string(),
                    opt(p.main_table_index),
                    p.total_columns.to_string(),
                    p.complete_columns.to_string(),
                    p.incomplete_columns.to_string(),
                ]
            })
        }),
    )?;

    let records = out.join("records.csv");
    write_csv(
        &records,
        RECORDS_HEADER,
        report.families.iter().flat_map(|f| {
            f.records.iter().map(|r| {
                let values = r
                    .values
                    .iter()
                    .map(|(l, v)| format!("{l}={}", display_value(v)))
                    .collect::<Vec<_>>()
                    .join("; ");
                vec![
                    r.family.clone(),
                    serde_json::to_value(r.scope)
                        .unwrap()
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    r.class.as_str().to_string(),
                    opt(r.entity.as_ref()),
                    opt(r.attribute.as_ref()),
                    opt(r.severity.map(|s| format!("{s:.6}"))),
                    values,
                    r.evidence.rationale.clone(),
                ]
            })
        }),
    )?;

    let presence = out.join("presence.csv");
    write_csv(
        &presence,
        PRESENCE_HEADER,
        report.families.iter().flat_map(|f| {
            f.grid
                .attributes
                .iter()
                .zip(&f.grid.present)
                .flat_map(move |(a, row)| {
                    f.grid.languages.iter().zip(row).map(move |(l, p)| {
                        vec![
                            f.id.clone(),
                            a.to_string(),
                            l.clone(),
                            u8::from(*p).to_string(),
                        ]
                    })
                })
        }),
    )?;

    let findings = out.join("findings.csv");
    write_csv(
        &findings,
        FINDINGS_HEADER,
        report.families.iter().flat_map(|f| {
            f.findings.iter().map(|x| {
                vec![
                    f.id.clone(),
                    serde_json::to_value(x.kind)
                        .unwrap()
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    opt(x.language.as_ref()),
                    opt(x.table_index),
                    opt(x.entity.as_ref()),
                    opt(x.attribute.as_ref()),
                    x.detail.clone(),
                ]
            })
        }),
    )?;
    Ok(vec![stats, records, presence, findings])
}

fn emit_plotdata(report: &Report, out: &Path) -> Result<Vec<PathBuf>, EmitError> {
    let languages = report.languages();
    let mut header = vec!["article"];
    header.extend(languages.iter().map(String::as_str));

    // Absent editions stay empty rather than zero.
    let matrix = |pick: fn(&crate::metrics::PageStats) -> usize| {
        report
            .families
            .iter()
            .map(|f| {
                let by_lang: BTreeMap<&str, usize> = f
                    .stats
                    .per_language
                    .iter()
                    .filter(|(_, pages)| !pages.is_empty())
                    .map(|(l, pages)| (l.as_str(), pages.iter().map(pick).sum()))
                    .collect();
                let mut row = vec![f.id.clone()];
                row.extend(languages.iter().map(|l| opt(by_lang.get(l.as_str()))));
                row
            })
            .collect::<Vec<_>>()
    };

    let tables = out.join("tables_by_language.csv");
    write_csv(&tables, &header, matrix(|p| p.table_count))?;
    let references = out.join("references_heatmap.csv");
    write_csv(&references, &header, matrix(|p| p.reference_count))?;
    let mut written = vec![tables, references];

    for f in &report.families {
        let path = out.join(format!("presence_{}.csv", f.id));
        let mut header = vec!["attribute"];
        header.extend(f.grid.languages.iter().map(String::as_str));
        write_csv(
            &path,
            &header,
            f.grid
                .attributes
                .iter()
                .zip(&f.grid.present)
                .map(|(a, row)| {
                    let mut cells = vec![a.to_string()];
                    cells.extend(row.iter().map(|p| u8::from(*p).to_string()));
                    cells
                }),
        )?;
        written.push(path);
    }
    Ok(written)
}
