//! Spreadsheet-style page grid used by field placements.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Highest column index, `ZZ`.
pub const MAX_COLUMN: u32 = 26 + 26 * 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordinateError {
    #[error("malformed grid cell {0:?}")]
    Malformed(String),
    #[error("field spans rows {from} to {to}; placements must stay on one row")]
    MultiRow { from: u32, to: u32 },
    #[error("span {from}..{to} runs right to left")]
    Reversed { from: GridCell, to: GridCell },
}

/// One grid cell. `column` is 1-based (`A` = 1, `Z` = 26, `AA` = 27 … `ZZ` = 702).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCell {
    pub column: u32,
    pub row: u32,
}

impl GridCell {
    pub fn new(column: u32, row: u32) -> Result<Self, CoordinateError> {
        if column == 0 || column > MAX_COLUMN || row == 0 {
            return Err(CoordinateError::Malformed(format!("col {column} row {row}")));
        }
        Ok(GridCell { column, row })
    }

    pub fn column_label(&self) -> String {
        column_label(self.column)
    }
}

pub fn column_label(column: u32) -> String {
    if column <= 26 {
        char::from(b'A' + (column - 1) as u8).to_string()
    } else {
        let hi = (column - 27) / 26;
        let lo = (column - 27) % 26;
        format!("{}{}", char::from(b'A' + hi as u8), char::from(b'A' + lo as u8))
    }
}

impl fmt::Display for GridCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.column_label(), self.row)
    }
}

impl FromStr for GridCell {
    type Err = CoordinateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CoordinateError::Malformed(s.to_string());
        let split = s.find(|c: char| !c.is_ascii_uppercase()).ok_or_else(bad)?;
        let (letters, digits) = s.split_at(split);
        let column = match letters.as_bytes() {
            [a] => u32::from(a - b'A') + 1,
            [a, b] => 27 + u32::from(a - b'A') * 26 + u32::from(b - b'A'),
            _ => return Err(bad()),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(bad());
        }
        let row: u32 = digits.parse().map_err(|_| bad())?;
        GridCell::new(column, row)
    }
}

impl Serialize for GridCell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Checks the single-row, left-to-right rule for a span.
pub fn check_span(from: GridCell, to: GridCell) -> Result<(), CoordinateError> {
    if from.row != to.row {
        return Err(CoordinateError::MultiRow { from: from.row, to: to.row });
    }
    if from.column > to.column {
        return Err(CoordinateError::Reversed { from, to });
    }
    Ok(())
}

/// Every cell covered by a placement, left to right.
pub fn grid_cells(p: &super::FieldPlacement) -> Result<Vec<GridCell>, CoordinateError> {
    check_span(p.position_from, p.position_to)?;
    Ok((p.position_from.column..=p.position_to.column)
        .map(|column| GridCell { column, row: p.position_from.row })
        .collect())
}
