//! Tabular output with a header block. Floats are written in the shortest
//! round-trip form, so identical runs give identical bytes.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance of an output file.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub program: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub units: Vec<(&'static str, &'static str)>,
    pub config: Value,
}

impl Header {
    pub fn new(command: &'static str, units: Vec<(&'static str, &'static str)>, config: Value) -> Self {
        Self {
            program: "pairgf",
            version: VERSION,
            command,
            units,
            config,
        }
    }

    fn units_json(&self) -> Value {
        Value::Object(
            self.units
                .iter()
                .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
                .collect(),
        )
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("program".into(), self.program.into());
        m.insert("version".into(), self.version.into());
        m.insert("command".into(), self.command.into());
        m.insert("units".into(), self.units_json());
        m.insert("config".into(), self.config.clone());
        Value::Object(m)
    }
}

/// Named columns of floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip scientific notation.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // drop the sign of negative zero
        "0e0".to_string()
    } else {
        format!("{x:e}")
    }
}

fn number(x: f64) -> Value {
    if x == 0.0 {
        return Value::from(0.0);
    }
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn write_table<W: Write>(out: &mut W, header: &Header, table: &Table, format: Format) -> CliResult<()> {
    match format {
        Format::Csv => write_csv(out, header, table),
        Format::Json => write_json(out, header, table),
    }
}

fn write_csv<W: Write>(out: &mut W, header: &Header, table: &Table) -> CliResult<()> {
    writeln!(out, "# {} {}", header.program, header.version)?;
    writeln!(out, "# command: {}", header.command)?;
    let units: Vec<String> = header.units.iter().map(|(k, v)| format!("{k} [{v}]")).collect();
    writeln!(out, "# units: {}", units.join("; "))?;
    writeln!(out, "# config: {}", serde_json::to_string(&header.config)?)?;
    let mut writer = csv::Writer::from_writer(&mut *out);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|x| format_float(*x)))?;
    }
    writer.flush()?;
    Ok(())
}

fn write_json<W: Write>(out: &mut W, header: &Header, table: &Table) -> CliResult<()> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            Value::Object(
                table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, x)| (name.to_string(), number(*x)))
                    .collect(),
            )
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("header".into(), header.to_json());
    doc.insert("rows".into(), Value::Array(rows));
    write_json_value(out, &Value::Object(doc))
}

pub fn write_json_value<W: Write>(out: &mut W, value: &Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
