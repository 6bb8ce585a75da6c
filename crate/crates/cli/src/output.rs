//! Tables with a provenance header, emitted as CSV or JSON.

use std::io::Write;

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::CliError;

pub const SIG_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn num(v: f64) -> Self {
        Cell::Num(round_sig(v))
    }

    pub fn text(s: impl ToString) -> Self {
        Cell::Text(s.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_num(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Text(s) => json!(s),
            _ => Value::Null,
        }
    }
}

/// Rounds to nine significant digits. The result prints (via `Display`) as
/// the shortest string that parses back to the same bits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().expect("formatted float parses")
}

pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let a = v.abs();
        if a == 0.0 {
            "0".into()
        } else if !(1e-4..1e12).contains(&a) {
            format!("{v:e}")
        } else {
            format!("{v}")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub tool: String,
    pub command: String,
    /// Resolved config as TOML.
    pub config: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputTable {
    pub fn new(command: impl Into<String>, config: String, columns: &[&str]) -> Self {
        OutputTable {
            tool: format!("p1spin {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        writeln!(out, "# tool: {}", self.tool)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# config:")?;
        for line in self.config.lines() {
            if line.is_empty() {
                writeln!(out, "#")?;
            } else {
                writeln!(out, "#   {line}")?;
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns).map_err(csv_io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({
            "tool": self.tool,
            "command": self.command,
            "config": self.config,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Io(e.into()))?;
        writeln!(out)?;
        Ok(())
    }

    /// Reads back a CSV produced by `write_csv`. Cells that parse as numbers
    /// become `Num`, blanks `Empty`, everything else `Text`.
    pub fn parse_csv(text: &str) -> Result<Self, CliError> {
        let mut tool = String::new();
        let mut command = String::new();
        let mut config = String::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some(v) = line.strip_prefix("# tool: ") {
                tool = v.to_string();
            } else if let Some(v) = line.strip_prefix("# command: ") {
                command = v.to_string();
            } else if let Some(v) = line.strip_prefix("#   ") {
                config.push_str(v);
                config.push('\n');
            } else if line == "#" {
                config.push('\n');
            }
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| CliError::Input(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Input(e.to_string()))?;
            rows.push(
                rec.iter()
                    .map(|s| match s {
                        "" => Cell::Empty,
                        _ => s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::text(s)),
                    })
                    .collect(),
            );
        }
        Ok(OutputTable {
            tool,
            command,
            config,
            columns,
            rows,
        })
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(e.into())
}
