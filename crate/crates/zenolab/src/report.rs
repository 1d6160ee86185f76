//! Output documents: CSV series with mandatory metadata headers and JSON
//! reports that re-parse under their own schema.
//!
//! CSV dialect: comma separator, `.` decimal point, one header row, LF line
//! endings. Metadata lines start with `# ` and always carry the schema
//! version, the command name, and the full configuration exactly as used.
//! Floats are written with the shortest round-trip representation, so a
//! fixed configuration produces byte-identical files across runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crate::config::SCHEMA_VERSION;

/// A CSV document with metadata header lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvDoc {
    pub command: String,
    pub config: serde_json::Value,
    /// Extra `key=value` metadata lines (worker counts, derived quantities).
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvDoc {
    pub fn new(command: &str, config: serde_json::Value, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            config,
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn encode(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema_version={SCHEMA_VERSION}\n"));
        out.push_str(&format!("# command={}\n", self.command));
        out.push_str(&format!(
            "# config={}\n",
            serde_json::to_string(&self.config).expect("config serializes")
        ));
        for (key, value) in &self.meta {
            out.push_str(&format!("# {key}={value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(&format_float(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip float formatting with a stable exponent style.
fn format_float(v: f64) -> String {
    if v == 0.0 {
        // normalize -0.0
        return "0".to_string();
    }
    format!("{v}")
}

/// JSON report envelope; every emitted report re-parses under this schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonReport<T> {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub result: T,
}

impl<T: Serialize> JsonReport<T> {
    pub fn new(command: &str, config: serde_json::Value, result: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            result,
        }
    }

    pub fn encode(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("report serialization failed: {e}")))?;
        text.push('\n');
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut doc = CsvDoc::new("survival", serde_json::json!({"a": 1}), &["t", "p"]);
        doc.push_meta("workers", 2);
        doc.push_row(vec![0.0, 1.0]);
        doc.push_row(vec![0.5, 0.25]);
        let text = doc.encode();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema_version=1");
        assert_eq!(lines[1], "# command=survival");
        assert_eq!(lines[2], "# config={\"a\":1}");
        assert_eq!(lines[3], "# workers=2");
        assert_eq!(lines[4], "t,p");
        assert_eq!(lines[5], "0,1");
        assert_eq!(lines[6], "0.5,0.25");
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn floats_round_trip_through_the_csv() {
        let values = [1.0 / 3.0, 2.0_f64.sqrt() * 1e-12, -7.25e100, 0.1 + 0.2];
        for &v in &values {
            let parsed: f64 = format_float(v).parse().unwrap();
            assert_eq!(parsed, v);
        }
        assert_eq!(format_float(-0.0), "0");
    }

    #[test]
    fn json_report_round_trip() {
        let report = JsonReport::new("pole", serde_json::json!({"x": 2}), vec![1.0, 2.0]);
        let text = report.encode().unwrap();
        let back: JsonReport<Vec<f64>> = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
    }
}
