//! CSV and JSON writers for flat records.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub type Record = Map<String, Value>;

pub enum Output {
    One(Record),
    Many(Vec<Record>),
    Text(String),
}

/// JSON number for finite values, `null` otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv<W: Write>(records: &[Record], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    if let Some(first) = records.first() {
        w.write_record(first.keys())?;
    }
    for r in records {
        w.write_record(r.values().map(cell))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write<W: Write>(output: &Output, format: Format, mut out: W) -> Result<(), CliError> {
    match (output, format) {
        (Output::Text(t), _) => out.write_all(t.as_bytes())?,
        (Output::One(r), Format::Csv) => write_csv(std::slice::from_ref(r), out)?,
        (Output::Many(rs), Format::Csv) => write_csv(rs, out)?,
        (Output::One(r), Format::Json) => {
            serde_json::to_writer_pretty(&mut out, r).map_err(std::io::Error::other)?;
            out.write_all(b"\n")?;
        }
        (Output::Many(rs), Format::Json) => {
            serde_json::to_writer_pretty(&mut out, rs).map_err(std::io::Error::other)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
