//! Report envelope and emission.
//!
//! Every run emits one report: `{ meta, kind, payload }`. The JSON shape
//! is pinned by docs/report.schema; CSV and human renderings are derived
//! views of the same payload.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub eps: f64,
    pub seed: u64,
    pub workers: usize,
    pub stable: bool,
    /// Resolved subcommand parameters, echoed verbatim.
    pub config: Value,
    /// Zeroed under --stable.
    pub wall_time_s: f64,
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub meta: Meta,
    pub kind: &'static str,
    pub payload: T,
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// One CSV table: a header line and data rows.
pub struct Csv {
    pub header: String,
    pub rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv { header: header.to_string(), rows: Vec::new() }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn print(&self) {
        println!("{}", self.header);
        for r in &self.rows {
            println!("{}", r);
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    // enough digits to round-trip, no trailing noise for integers
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{:.12e}", x)
    }
}
