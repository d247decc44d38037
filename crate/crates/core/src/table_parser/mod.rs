//! Extraction of `wikitable` data tables from rendered page HTML into
//! rectangular grids of normalized cells.

mod spans;
mod text;

pub use spans::{expand_spans, parse_span, RawCell};
pub use text::normalize;

use ego_tree::NodeRef;
use percent_encoding::percent_decode_str;
use scraper::{ElementRef, Html, Node, Selector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mw_client::{ArticleRef, PageDocument};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot parse {0}: document is empty")]
    ParseError(String),
}

/// One grid slot.
///
/// `text` is `normalize(raw_text)`, except that bracketed link labels are
/// never mistaken for footnote markers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub text: String,
    pub link_title: Option<String>,
    pub raw_text: String,
    pub is_spanned_copy: bool,
    /// Came from a `<th>`.
    pub is_header: bool,
    /// Padding added to repair a ragged row.
    pub is_pad: bool,
}

impl Cell {
    pub fn plain(raw: &str) -> Self {
        Cell {
            text: normalize(raw),
            link_title: None,
            raw_text: raw.to_string(),
            is_spanned_copy: false,
            is_header: false,
            is_pad: false,
        }
    }

    pub fn header(raw: &str) -> Self {
        Cell {
            is_header: true,
            ..Cell::plain(raw)
        }
    }

    pub fn linked(raw: &str, target: &str) -> Self {
        Cell {
            link_title: Some(target.to_string()),
            ..Cell::plain(raw)
        }
    }

    pub fn pad() -> Self {
        Cell {
            is_pad: true,
            ..Cell::plain("")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WikiTable {
    pub source: ArticleRef,
    /// Position among the tables extracted from the page.
    pub table_index: usize,
    pub caption: Option<String>,
    pub header_rows: Vec<Vec<Cell>>,
    pub body_rows: Vec<Vec<Cell>>,
    pub n_cols: usize,
}

impl WikiTable {
    /// Builds a table from an already rectangular grid, splitting off the
    /// header rows.
    pub fn from_grid(
        source: ArticleRef,
        table_index: usize,
        caption: Option<String>,
        grid: Vec<Vec<Cell>>,
    ) -> Option<Self> {
        let n_cols = grid.first().map_or(0, Vec::len);
        if n_cols == 0 || grid.iter().any(|row| row.len() != n_cols) {
            return None;
        }
        let (header_rows, body_rows) = detect_header(grid);
        Some(WikiTable {
            source,
            table_index,
            caption,
            header_rows,
            body_rows,
            n_cols,
        })
    }

    /// One label per column; stacked header rows are joined with " / ",
    /// skipping empty parts and repeats from vertical spans.
    pub fn column_labels(&self) -> Vec<String> {
        (0..self.n_cols)
            .map(|col| {
                let mut parts: Vec<&str> = Vec::new();
                for row in &self.header_rows {
                    let text = row[col].text.as_str();
                    if !text.is_empty() && parts.last() != Some(&text) {
                        parts.push(text);
                    }
                }
                parts.join(" / ")
            })
            .collect()
    }

    pub fn area(&self) -> usize {
        self.body_rows.len() * self.n_cols
    }
}

/// Splits a grid into header and body rows.
///
/// Leading rows made only of `<th>` cells are the header. Without any such
/// row the first row is promoted.
pub fn detect_header(mut grid: Vec<Vec<Cell>>) -> (Vec<Vec<Cell>>, Vec<Vec<Cell>>) {
    let leading = grid
        .iter()
        .take_while(|row| {
            let mut real = row.iter().filter(|c| !c.is_pad).peekable();
            real.peek().is_some() && real.all(|c| c.is_header)
        })
        .count();
    let split = if leading == 0 {
        grid.len().min(1)
    } else {
        leading
    };
    let body = grid.split_off(split);
    (grid, body)
}

const EXCLUDED_CLASSES: [&str; 4] = ["infobox", "navbox", "metadata", "sidebar"];

fn has_class(elem: &ElementRef, class: &str) -> bool {
    elem.value().classes().any(|c| c == class)
}

fn is_excluded(elem: &ElementRef) -> bool {
    EXCLUDED_CLASSES.iter().any(|c| has_class(elem, c))
}

fn is_wikitable(elem: &ElementRef) -> bool {
    elem.value().name() == "table" && has_class(elem, "wikitable")
}

/// Every `wikitable` in document order. Infoboxes, navboxes, metadata and
/// sidebar tables are skipped, as is anything nested inside them or inside
/// another wikitable (nested content is flattened into the outer cell).
/// Tables without a single cell are skipped.
pub fn extract_tables(doc: &PageDocument) -> Result<Vec<WikiTable>, TableError> {
    if doc.html.trim().is_empty() {
        return Err(TableError::ParseError(doc.article.to_string()));
    }
    let html = Html::parse_document(&doc.html);
    let selector = Selector::parse("table").expect("static selector");
    let mut tables = Vec::new();
    for elem in html.select(&selector) {
        if !is_wikitable(&elem) || is_excluded(&elem) {
            continue;
        }
        let nested = elem
            .ancestors()
            .filter_map(ElementRef::wrap)
            .any(|a| is_excluded(&a) || is_wikitable(&a));
        if nested {
            continue;
        }
        if let Some(table) = build_table(elem, &doc.article, tables.len()) {
            tables.push(table);
        }
    }
    Ok(tables)
}

fn build_table(elem: ElementRef, source: &ArticleRef, table_index: usize) -> Option<WikiTable> {
    let mut rows = Vec::new();
    for tr in table_rows(elem) {
        let cells = tr
            .children()
            .filter_map(ElementRef::wrap)
            .filter(|c| matches!(c.value().name(), "td" | "th"))
            .map(|c| {
                RawCell::new(
                    make_cell(c),
                    parse_span(c.value().attr("rowspan"), true),
                    parse_span(c.value().attr("colspan"), false),
                )
            })
            .collect();
        rows.push(cells);
    }
    let caption = elem
        .children()
        .filter_map(ElementRef::wrap)
        .find(|c| c.value().name() == "caption")
        .map(|c| {
            let mut raw = String::new();
            for child in c.children() {
                collect_text(child, &mut raw, &mut Vec::new(), false);
            }
            normalize(&raw)
        })
        .filter(|c| !c.is_empty());
    WikiTable::from_grid(source.clone(), table_index, caption, expand_spans(rows))
}

/// `<tr>` elements of this table only, looking through thead/tbody/tfoot.
fn table_rows(table: ElementRef) -> Vec<ElementRef> {
    let mut rows = Vec::new();
    for child in table.children().filter_map(ElementRef::wrap) {
        match child.value().name() {
            "tr" => rows.push(child),
            "thead" | "tbody" | "tfoot" => rows.extend(
                child
                    .children()
                    .filter_map(ElementRef::wrap)
                    .filter(|c| c.value().name() == "tr"),
            ),
            _ => {}
        }
    }
    rows
}

fn make_cell(elem: ElementRef) -> Cell {
    let mut raw = String::new();
    let mut protected = Vec::new();
    for child in elem.children() {
        collect_text(child, &mut raw, &mut protected, false);
    }
    let link_title = elem
        .descendants()
        .filter_map(ElementRef::wrap)
        .filter(|a| a.value().name() == "a" && !inside_reference(a, &elem))
        .find_map(|a| a.value().attr("href").and_then(link_title_from_href));
    Cell {
        text: text::normalize_protected(&raw, &protected),
        link_title,
        raw_text: raw,
        is_spanned_copy: false,
        is_header: elem.value().name() == "th",
        is_pad: false,
    }
}

fn is_reference(elem: &ElementRef) -> bool {
    has_class(elem, "reference") || has_class(elem, "mw-ref")
}

fn inside_reference(node: &ElementRef, cell: &ElementRef) -> bool {
    node.ancestors()
        .take_while(|a| a.id() != cell.id())
        .filter_map(ElementRef::wrap)
        .any(|a| is_reference(&a))
}

fn is_hidden(elem: &ElementRef) -> bool {
    let style_hidden = elem.value().attr("style").is_some_and(|s| {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        compact.to_ascii_lowercase().contains("display:none")
    });
    style_hidden || has_class(elem, "sortkey")
}

/// Visible text of a subtree. Byte ranges of link labels containing
/// brackets are recorded so normalization leaves them alone.
fn collect_text(
    node: NodeRef<Node>,
    out: &mut String,
    protected: &mut Vec<(usize, usize)>,
    in_reference: bool,
) {
    match node.value() {
        Node::Text(t) => out.push_str(t),
        Node::Element(e) => {
            let Some(elem) = ElementRef::wrap(node) else {
                return;
            };
            let name = e.name();
            if matches!(name, "style" | "script") || is_hidden(&elem) {
                return;
            }
            if name == "br" {
                out.push(' ');
                return;
            }
            let block = matches!(
                name,
                "p" | "div" | "li" | "ul" | "ol" | "td" | "th" | "tr" | "table" | "caption"
            );
            if block {
                out.push(' ');
            }
            let in_reference = in_reference || is_reference(&elem);
            let start = out.len();
            for child in node.children() {
                collect_text(child, out, protected, in_reference);
            }
            if name == "a" && !in_reference && out[start..].contains('[') {
                protected.push((start, out.len()));
            }
            if block {
                out.push(' ');
            }
        }
        _ => {}
    }
}

/// Namespaces whose pages are never row entities.
const NON_ARTICLE_NAMESPACES: &[&str] = &[
    "file",
    "image",
    "media",
    "category",
    "template",
    "help",
    "special",
    "wikipedia",
    "wp",
    "portal",
    "talk",
    "user",
    "module",
    "mediawiki",
    "draft",
    "wikt",
    "wiktionary",
    "d",
    "commons",
    "datei",
    "bild",
    "kategorie",
    "vorlage",
    "hilfe",
    "spezial",
    "benutzer",
    "diskussion",
    "fichier",
    "catégorie",
    "modèle",
    "aide",
    "spécial",
    "categoria",
    "aiuto",
    "speciale",
    "immagine",
    "bestand",
    "afbeelding",
    "categorie",
    "sjabloon",
    "speciaal",
    "overleg",
    "gebruiker",
    "文件",
    "檔案",
    "图像",
    "分类",
    "分類",
    "模板",
    "帮助",
    "特殊",
    "维基百科",
    "維基百科",
];

/// Internal article link target from an `href`, in display form (spaces, not
/// underscores). External, interwiki and non-article links yield `None`.
pub fn link_title_from_href(href: &str) -> Option<String> {
    let path = href
        .strip_prefix("./")
        .or_else(|| href.strip_prefix("/wiki/"))?;
    let path = path.split(['#', '?']).next()?;
    let decoded = percent_decode_str(path).decode_utf8().ok()?;
    let title = decoded.replace('_', " ").trim().to_string();
    if title.is_empty() {
        return None;
    }
    if let Some((prefix, _)) = title.split_once(':') {
        let prefix = prefix.trim().to_lowercase();
        if NON_ARTICLE_NAMESPACES.contains(&prefix.as_str()) {
            return None;
        }
    }
    Some(title)
}
