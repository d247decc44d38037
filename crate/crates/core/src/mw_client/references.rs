use std::collections::HashSet;

use scraper::{Html, Selector};
use thiserror::Error;

use super::PageDocument;

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("cannot parse {0}: document is empty")]
    ParseError(String),
}

/// Number of distinct items in the page's rendered reference lists.
///
/// Inline citation markers are not counted: a source cited five times is
/// still one list item.
pub fn count_references(doc: &PageDocument) -> Result<usize, ReferenceError> {
    if doc.html.trim().is_empty() {
        return Err(ReferenceError::ParseError(doc.article.to_string()));
    }
    let html = Html::parse_document(&doc.html);
    let selector = Selector::parse("ol.references > li").expect("static selector");
    let distinct: HashSet<_> = html.select(&selector).map(|li| li.id()).collect();
    Ok(distinct.len())
}
