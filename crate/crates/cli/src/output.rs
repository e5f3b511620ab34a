//! Tables with a header block, written as CSV or JSON lines.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A float as JSON; non-finite values become strings so every row parses.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format!("{x}"))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn write_table<W: Write>(out: W, format: Format, header: &[(String, Value)], table: &Table) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(out, header, table),
        Format::Json => write_json(out, header, table),
    }
}

fn write_csv<W: Write>(mut out: W, header: &[(String, Value)], table: &Table) -> io::Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}={}", cell(v))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell))?;
    }
    w.flush()
}

fn write_json<W: Write>(mut out: W, header: &[(String, Value)], table: &Table) -> io::Result<()> {
    let mut h = Map::new();
    for (k, v) in header {
        h.insert(k.clone(), v.clone());
    }
    writeln!(out, "{}", json!({ "header": h }))?;
    for row in &table.rows {
        let obj: Map<String, Value> = table.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
        writeln!(out, "{}", Value::Object(obj))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_header() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![json!(1), json!("x,y")]);
        let mut buf = Vec::new();
        write_table(&mut buf, Format::Csv, &[("k".into(), json!(2.5))], &t).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# k=2.5\na,b\n1,\"x,y\"\n");
    }

    #[test]
    fn json_lines() {
        let mut t = Table::new(&["a"]);
        t.push(vec![num(f64::INFINITY)]);
        let mut buf = Vec::new();
        write_table(&mut buf, Format::Json, &[], &t).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], r#"{"header":{}}"#);
        assert_eq!(lines[1], r#"{"a":"inf"}"#);
    }
}
