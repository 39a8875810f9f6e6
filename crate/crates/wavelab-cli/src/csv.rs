//! Rectangular CSV tables with exact binary64 round-tripping.
//!
//! Floats are written with 17 significant digits, enough that parsing the
//! text recovers the original bits. Files are UTF-8, comma-separated, LF
//! line endings, header first; a table without rows becomes a header-only
//! file.

use crate::{Failure, RunResult};
use std::fmt::Write as _;
use std::path::Path;

/// Formats a float so `parse::<f64>()` returns the exact same value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) -> RunResult<()> {
        match self {
            Cell::Int(v) => write!(out, "{v}").expect("write to string"),
            Cell::Float(v) => out.push_str(&fmt_f64(*v)),
            Cell::Bool(v) => write!(out, "{v}").expect("write to string"),
            Cell::Text(s) => {
                if s.contains([',', '\n', '\r', '"']) {
                    return Err(Failure::Usage(format!(
                        "text cell {s:?} contains a separator or quote"
                    )));
                }
                out.push_str(s);
            }
        }
        Ok(())
    }
}

/// A rectangular table: every row has exactly one cell per header column.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: Vec<S>) -> RunResult<Self> {
        let header: Vec<String> = header.into_iter().map(Into::into).collect();
        if header.is_empty() {
            return Err(Failure::Usage("a table needs at least one column".into()));
        }
        for name in &header {
            if name.is_empty() || name.contains([',', '\n', '\r', '"']) {
                return Err(Failure::Usage(format!("invalid column name {name:?}")));
            }
        }
        Ok(Self {
            header,
            rows: Vec::new(),
        })
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> RunResult<()> {
        if row.len() != self.header.len() {
            return Err(Failure::Usage(format!(
                "row with {} cells in a table of {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn to_csv_string(&self) -> RunResult<String> {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out)?;
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write_to(&self, path: &Path) -> RunResult<()> {
        let text = self.to_csv_string()?;
        std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn floats_round_trip_bit_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            // Spread mantissas across many magnitudes.
            let v: f64 = rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-300..300));
            let back: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v}");
        }
        assert_eq!(fmt_f64(0.0).parse::<f64>().unwrap().to_bits(), 0f64.to_bits());
    }

    #[test]
    fn empty_tables_become_a_header_only_file() {
        let t = CsvTable::new(vec!["a", "b"]).unwrap();
        assert_eq!(t.to_csv_string().unwrap(), "a,b\n");
    }

    #[test]
    fn one_by_one_table_is_two_lines() {
        let mut t = CsvTable::new(vec!["x"]).unwrap();
        t.push_row(vec![Cell::Float(0.5)]).unwrap();
        let text = t.to_csv_string().unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines.len(), 3); // header, row, trailing empty
        assert_eq!(lines[0], "x");
        assert_eq!(lines[1].parse::<f64>().unwrap(), 0.5);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn mixed_cells_render_plainly() {
        let mut t = CsvTable::new(vec!["case", "ok", "name"]).unwrap();
        t.push_row(vec![
            Cell::Int(3),
            Cell::Bool(true),
            Cell::Text("dirac".into()),
        ])
        .unwrap();
        assert_eq!(t.to_csv_string().unwrap(), "case,ok,name\n3,true,dirac\n");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = CsvTable::new(vec!["a", "b"]).unwrap();
        assert!(t.push_row(vec![Cell::Int(1)]).is_err());
    }

    #[test]
    fn text_cells_with_separators_are_rejected() {
        let mut t = CsvTable::new(vec!["a"]).unwrap();
        t.push_row(vec![Cell::Text("x,y".into())]).unwrap();
        assert!(t.to_csv_string().is_err());
        assert!(CsvTable::new(vec!["bad,name"]).is_err());
    }
}
