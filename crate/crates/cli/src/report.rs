//! Tabular output shared by all commands, rendered as CSV or JSON.
//!
//! CSV files start with two comment lines, `# tool=zeno version=... command=...
//! config_hash=... status=...` and `# config=<resolved config as JSON>`,
//! followed by the header row. Floats carry 17 significant digits.

use serde_json::{Map, Value};
use std::fmt::Write as _;

pub const TOOL: &str = "zeno";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => (*s).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::from(*s),
        }
    }
}

/// How a run ended. Anything but `Completed` means the rows are partial or
/// untrustworthy beyond the stated period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    /// Gaussian photon number passed the divergence guard at this period.
    Diverged { period: usize },
    /// Fock leakage passed the threshold at this period.
    TruncationUnsafe { period: usize },
}

impl Status {
    pub fn is_guard_trip(&self) -> bool {
        !matches!(self, Status::Completed)
    }

    fn fields(&self) -> Vec<(&'static str, Value)> {
        match *self {
            Status::Completed => vec![("status", "completed".into())],
            Status::Diverged { period } => vec![("status", "diverged".into()), ("diverged_period", period.into())],
            Status::TruncationUnsafe { period } => {
                vec![("status", "truncation_unsafe".into()), ("first_unsafe_period", period.into())]
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub config_hash: String,
    pub status: Status,
    /// Run summaries, e.g. the largest photon number seen.
    pub extras: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.status.is_guard_trip() {
            1
        } else {
            0
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    fn meta(&self) -> Vec<(&'static str, Value)> {
        let mut meta = vec![
            ("tool", Value::from(TOOL)),
            ("version", Value::from(VERSION)),
            ("command", Value::from(self.command)),
            ("config_hash", Value::from(self.config_hash.clone())),
        ];
        meta.extend(self.status.fields());
        meta.extend(self.extras.iter().cloned());
        meta
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("#");
        for (k, v) in self.meta() {
            let text = match v {
                Value::String(s) => s,
                Value::Number(n) => match n.as_f64() {
                    Some(f) if !n.is_u64() && !n.is_i64() => format!("{f:.16e}"),
                    _ => n.to_string(),
                },
                other => other.to_string(),
            };
            let _ = write!(out, " {k}={text}");
        }
        out.push('\n');
        let _ = writeln!(out, "# config={}", self.config);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut meta: Map<String, Value> = self.meta().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        meta.insert("config".into(), self.config.clone());
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
        text.push('\n');
        text
    }
}
