//! Column tables and their CSV form.

use std::fmt::Write as _;

use delone::Dataset;

/// Columns that hold indices and are printed without a fraction.
const INDEX_COLUMNS: &[&str] = &["n", "k", "n_prime", "size"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Drops the first `count` rows.
    pub fn skip_first(mut self, count: usize) -> Self {
        self.rows.drain(..count.min(self.rows.len()));
        self
    }

    fn is_index(&self, col: usize) -> bool {
        INDEX_COLUMNS.contains(&self.columns[col].as_str())
    }

    /// Header row, then one line per row. Reals carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if self.is_index(i) {
                    let _ = write!(out, "{}", *v as i64);
                } else {
                    let _ = write!(out, "{v:.16e}");
                }
            }
            out.push('\n');
        }
        out
    }
}

impl From<Dataset> for Table {
    fn from(d: Dataset) -> Self {
        Table {
            name: d.name,
            columns: d.columns,
            rows: d.rows,
        }
    }
}
