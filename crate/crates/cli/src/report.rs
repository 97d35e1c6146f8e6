//! Report layout shared by every subcommand.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "visidense/1";

/// One radius of a census or ball count. Exact counts are decimal strings.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Row {
    pub n: u64,
    pub sphere_or_ball_size: String,
    pub visible_count: String,
    pub fraction: f64,
    pub annular_estimate: Option<f64>,
    pub theoretical_even: Option<f64>,
    pub theoretical_odd: Option<f64>,
    pub theoretical_annular: Option<f64>,
}

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "sphere_or_ball_size",
    "visible_count",
    "fraction",
    "annular_estimate",
    "theoretical_even",
    "theoretical_odd",
    "theoretical_annular",
];

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub command: String,
    pub parameters: Value,
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub metadata: Metadata,
    pub rows: Vec<Row>,
    /// Command-specific values that do not fit the per-radius rows.
    pub summary: Value,
}

impl Report {
    pub fn new(command: &str, parameters: Value, rows: Vec<Row>, summary: Value) -> Self {
        Report {
            schema: SCHEMA,
            metadata: Metadata {
                command: command.to_string(),
                parameters,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            },
            rows,
            summary,
        }
    }

    pub fn write_json(&self, out: &mut impl Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    /// Header row plus one line per row; the summary is JSON-only.
    pub fn write_csv(&self, out: &mut impl Write) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}
