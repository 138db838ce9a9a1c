//! Reference values of the four tables, embedded at build time. Each value
//! carries its table, row and column so that a failing comparison names the
//! exact cell.

use serde::{Deserialize, Serialize};

use crate::tables::TableId;

/// One reference cell, in the displayed `x 10^4` scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    /// Table name.
    pub table: String,
    /// Row label.
    pub row: String,
    /// Column label.
    pub column: String,
    /// Value times `10^4`.
    pub value: f64,
}

/// All reference cells of one table, in row-major display order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    /// Cells.
    pub cells: Vec<ReferenceValue>,
}

fn source(id: TableId) -> &'static str {
    match id {
        TableId::T1bis => include_str!("../reference/table_1bis.csv"),
        TableId::T1a => include_str!("../reference/table_1a.csv"),
        TableId::T1b => include_str!("../reference/table_1b.csv"),
        TableId::T2 => include_str!("../reference/table_2.csv"),
    }
}

/// Loads the reference values of a table.
pub fn reference(id: TableId) -> ReferenceTable {
    let mut rd = csv::Reader::from_reader(source(id).as_bytes());
    let cells = rd
        .deserialize()
        .collect::<Result<Vec<ReferenceValue>, _>>()
        .expect("embedded reference CSV is well formed");
    ReferenceTable { cells }
}

fn unique(it: impl Iterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in it {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

impl ReferenceTable {
    /// Row labels in display order.
    pub fn rows(&self) -> Vec<String> {
        unique(self.cells.iter().map(|c| c.row.clone()))
    }

    /// Column labels in display order.
    pub fn columns(&self) -> Vec<String> {
        unique(self.cells.iter().map(|c| c.column.clone()))
    }

    /// Value of a cell, times `10^4`.
    pub fn get(&self, row: &str, column: &str) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.row == row && c.column == column)
            .map(|c| c.value)
    }

    /// Dense matrix in display order.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let cols = self.columns();
        self.rows()
            .iter()
            .map(|r| {
                cols.iter()
                    .map(|c| self.get(r, c).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }
}
