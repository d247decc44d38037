//! Occupancy-bitmap reference for rowspan/colspan expansion.

use std::collections::HashMap;

use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use tablediff::mw_client::{ArticleRef, PageDocument};
use tablediff::table_parser::{Cell, RawCell};

/// (row span, column span) per cell, per row.
pub type Layout = Vec<Vec<(usize, usize)>>;

#[derive(Debug, Clone, PartialEq)]
pub enum Slot {
    Origin(String),
    Copy(String),
    Pad,
}

pub fn oracle(layout: &Layout) -> Vec<Vec<Slot>> {
    let n_rows = layout.len();
    let mut taken: HashMap<(usize, usize), Slot> = HashMap::new();
    for (r, row) in layout.iter().enumerate() {
        let mut c = 0;
        for (i, &(rs, cs)) in row.iter().enumerate() {
            while taken.contains_key(&(r, c)) {
                c += 1;
            }
            let label = format!("r{r}c{i}");
            for dr in 0..rs {
                if r + dr >= n_rows {
                    break;
                }
                for dc in 0..cs {
                    taken.entry((r + dr, c + dc)).or_insert_with(|| {
                        if dr == 0 && dc == 0 {
                            Slot::Origin(label.clone())
                        } else {
                            Slot::Copy(label.clone())
                        }
                    });
                }
            }
            c += cs;
        }
    }
    let width = taken.keys().map(|&(_, c)| c + 1).max().unwrap_or(0);
    (0..n_rows)
        .map(|r| {
            (0..width)
                .map(|c| taken.get(&(r, c)).cloned().unwrap_or(Slot::Pad))
                .collect()
        })
        .collect()
}

pub fn slot(cell: &Cell) -> Slot {
    if cell.is_pad {
        Slot::Pad
    } else if cell.is_spanned_copy {
        Slot::Copy(cell.text.clone())
    } else {
        Slot::Origin(cell.text.clone())
    }
}

pub fn layouts() -> impl Strategy<Value = Layout> {
    prop::collection::vec(prop::collection::vec((1usize..4, 1usize..4), 1..5), 1..7)
}

pub fn to_html(layout: &Layout) -> String {
    let mut html = String::from("<table class=\"wikitable\">");
    for (r, row) in layout.iter().enumerate() {
        html.push_str("<tr>");
        for (i, &(rs, cs)) in row.iter().enumerate() {
            html.push_str(&format!(
                "<td rowspan=\"{rs}\" colspan=\"{cs}\">r{r}c{i}</td>"
            ));
        }
        html.push_str("</tr>");
    }
    html.push_str("</table>");
    html
}

pub fn raw_cells(layout: &Layout) -> Vec<Vec<RawCell>> {
    layout
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(i, &(rs, cs))| RawCell::new(Cell::plain(&format!("r{r}c{i}")), rs, cs))
                .collect()
        })
        .collect()
}

pub fn document(html: String) -> PageDocument {
    PageDocument {
        article: ArticleRef::new("en", "Layout").unwrap(),
        html,
        revision_id: 1,
        revision_timestamp: Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap(),
        fetched_at: Utc.with_ymd_and_hms(2025, 1, 1, 0, 0, 0).unwrap(),
    }
}
