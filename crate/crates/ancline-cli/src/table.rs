//! Column-oriented numeric tables and their byte-stable emission.

use serde::Serialize;

/// One table cell; levels and counts stay integers in the output.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Str(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, headers: Vec<String>) -> Self {
        Self {
            name: name.into(),
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// CSV: header line, then one line per row; floats carry 17 significant
    /// digits; LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(format_cell).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }

    /// Numeric view of one column (integers widened to f64).
    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match &r[idx] {
                Cell::Int(v) => *v as f64,
                Cell::Num(v) => *v,
                Cell::Str(_) => f64::NAN,
            })
            .collect()
    }
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => format!("{v:.16e}"),
        Cell::Str(v) => v.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_lf_endings_and_17_digits() {
        let mut t = Table::new("t", vec!["n".into(), "x".into()]);
        t.push_row(vec![Cell::Int(1), Cell::Num(0.0015)]);
        t.push_row(vec![Cell::Int(2), Cell::Num(1.0 / 3.0)]);
        let csv = t.to_csv();
        assert_eq!(
            csv,
            "n,x\n1,1.5000000000000000e-3\n2,3.3333333333333331e-1\n"
        );
    }

    #[test]
    fn emission_is_byte_stable() {
        let mut t = Table::new("t", vec!["a".into()]);
        t.push_row(vec![Cell::Num(std::f64::consts::PI)]);
        assert_eq!(t.to_csv(), t.to_csv());
        assert_eq!(t.to_json(), t.to_json());
    }
}
