//! Cross-language comparison of Wikipedia tables.
//!
//! The pipeline fetches every language edition of an article, extracts its
//! `wikitable`s, aligns table rows across editions through Wikidata item ids,
//! maps column headers onto shared attributes, and reports value conflicts
//! and coverage gaps together with per-page table, reference and column
//! statistics.

pub mod entity_align;
pub mod manifest;
pub mod metrics;
pub mod mw_client;
pub mod pipeline;
pub mod report;
pub mod schema_align;
pub mod table_parser;
pub mod value_analysis;
