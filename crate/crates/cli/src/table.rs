use std::io::Write;

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows under a header, plus optional `#agg,` footer rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub footer_header: Vec<String>,
    pub footer: Vec<Vec<Value>>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut line = |cells: Vec<String>| {
            out.push_str(&cells.join(","));
            out.push('\n');
        };
        line(self.header.clone());
        for r in &self.rows {
            line(r.iter().map(cell).collect());
        }
        if !self.footer.is_empty() {
            line(std::iter::once("#agg".to_string()).chain(self.footer_header.iter().cloned()).collect());
            for r in &self.footer {
                line(std::iter::once("#agg".to_string()).chain(r.iter().map(cell)).collect());
            }
        }
        out
    }

    pub fn to_json(&self, meta: Map<String, Value>) -> String {
        let objects = |header: &[String], rows: &[Vec<Value>]| -> Value {
            Value::Array(
                rows.iter()
                    .map(|r| Value::Object(header.iter().cloned().zip(r.iter().cloned()).collect()))
                    .collect(),
            )
        };
        let mut top = meta;
        top.insert("rows".into(), objects(&self.header, &self.rows));
        if !self.footer.is_empty() {
            top.insert("aggregates".into(), objects(&self.footer_header, &self.footer));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format, meta: Map<String, Value>) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(meta),
        }
    }
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
