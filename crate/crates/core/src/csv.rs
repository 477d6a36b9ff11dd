//! Numeric CSV tables: one header row, then rows of `f64` written with 17
//! significant digits so every value reads back bit-for-bit.

use std::path::Path;

use crate::{Error, Result};

/// A header and rows of equal width.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(format!(
                "row has {} values but the table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Parse(format!("missing column `{name}`")))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.is_empty() {
            return Err(Error::Parse("empty CSV".into()));
        }
        let mut table = Table {
            columns,
            rows: Vec::new(),
        };
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let row = record
                .iter()
                .map(parse_value)
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
            table.push(row).map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Table::parse(&text)
    }
}

/// Scientific notation with 17 significant digits; non-finite values as `nan`, `inf`, `-inf`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn parse_value(s: &str) -> std::result::Result<f64, String> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse::<f64>().map_err(|e| format!("`{s}`: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip_is_exact(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..40)) {
            let mut t = Table::new(&["x"]);
            for v in &values {
                t.push(vec![*v]).unwrap();
            }
            let back = Table::parse(&t.to_csv_string()).unwrap();
            for (a, b) in values.iter().zip(back.column("x").unwrap()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn special_values_and_errors() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![f64::INFINITY, -0.0]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let back = Table::parse(&t.to_csv_string()).unwrap();
        assert_eq!(back.rows[0][0], f64::INFINITY);
        assert!(back.rows[0][1].is_sign_negative());
        assert!(back.column("c").is_err());
        let err = Table::parse("a,b\n1,2\n3,x\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }
}
