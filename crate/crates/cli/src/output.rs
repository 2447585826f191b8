use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Canonical float text: 17 significant digits, so parsing and printing
/// again reproduces the same bytes.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A header plus rows of floats, printed as CSV or as a JSON array of
/// objects keyed by column name.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, &v)| (k.to_string(), Value::from(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&rows).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Write to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for x in [
            0.0,
            1.0,
            -2.5e-300,
            std::f64::consts::PI,
            1.0 / 3.0,
            f64::MAX,
        ] {
            let text = format_float(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, x);
            assert_eq!(format_float(back), text);
        }
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_and_json_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![1.0, 0.5]);
        assert_eq!(
            t.to_csv(),
            "a,b\n1.0000000000000000e0,5.0000000000000000e-1\n"
        );
        let json: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json[0]["b"], 0.5);
        let keys: Vec<&String> = json[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["a", "b"]);
    }
}
