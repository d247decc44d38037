use super::Cell;

/// A parsed `<td>`/`<th>` before span expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCell {
    pub cell: Cell,
    pub rowspan: usize,
    pub colspan: usize,
}

impl RawCell {
    pub fn new(cell: Cell, rowspan: usize, colspan: usize) -> Self {
        RawCell {
            cell,
            rowspan,
            colspan,
        }
    }
}

const MAX_COLSPAN: usize = 1000;
const MAX_ROWSPAN: usize = 65534;

/// Reads a `rowspan`/`colspan` attribute value. Missing, zero, negative or
/// unparsable values become 1.
pub fn parse_span(value: Option<&str>, is_row: bool) -> usize {
    let max = if is_row { MAX_ROWSPAN } else { MAX_COLSPAN };
    value
        .map(str::trim)
        .map(|v| {
            let digits: String = v.chars().take_while(char::is_ascii_digit).collect();
            digits.parse::<usize>().unwrap_or(1)
        })
        .filter(|&n| n >= 1)
        .map_or(1, |n| n.min(max))
}

/// Expands row and column spans into a rectangular grid.
///
/// Each spanned cell is copied into every slot it covers, copies carrying
/// `is_spanned_copy`. A cell is placed in the first free slot of its row;
/// slots already claimed by an earlier span are not overwritten. Row spans
/// stop at the last row. Short rows are right-padded with empty pad cells.
pub fn expand_spans(rows: Vec<Vec<RawCell>>) -> Vec<Vec<Cell>> {
    let n_rows = rows.len();
    let mut grid: Vec<Vec<Option<Cell>>> = vec![Vec::new(); n_rows];
    for (r, row) in rows.into_iter().enumerate() {
        let mut col = 0;
        for raw in row {
            while grid[r].get(col).is_some_and(Option::is_some) {
                col += 1;
            }
            let rowspan = raw.rowspan.max(1).min(n_rows - r);
            let colspan = raw.colspan.max(1);
            for dr in 0..rowspan {
                let target = &mut grid[r + dr];
                if target.len() < col + colspan {
                    target.resize(col + colspan, None);
                }
                for dc in 0..colspan {
                    let slot = &mut target[col + dc];
                    if slot.is_some() {
                        continue;
                    }
                    let mut cell = raw.cell.clone();
                    cell.is_spanned_copy = dr > 0 || dc > 0;
                    *slot = Some(cell);
                }
            }
            col += colspan;
        }
    }
    let width = grid.iter().map(Vec::len).max().unwrap_or(0);
    grid.into_iter()
        .map(|row| {
            let mut row: Vec<Cell> = row
                .into_iter()
                .map(|c| c.unwrap_or_else(Cell::pad))
                .collect();
            row.resize_with(width, Cell::pad);
            row
        })
        .collect()
}
