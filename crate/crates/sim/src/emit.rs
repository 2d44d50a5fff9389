//! CSV and JSON result records.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{SimError, SimResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = SimError;

    fn from_str(s: &str) -> SimResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(SimError::Config(format!("unknown output format `{s}`"))),
        }
    }
}

/// One operating point. Floats are written in shortest round-trip form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub scheme: String,
    pub ka: usize,
    pub m: usize,
    pub n: usize,
    pub ebn0_db: f64,
    pub trials: usize,
    pub pmd: f64,
    pub pfa: f64,
    pub pe: f64,
    pub seed: u64,
}

pub fn render(records: &[Record], format: Format) -> SimResult<String> {
    if records.is_empty() {
        return Err(SimError::Config("nothing to emit".into()));
    }
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            for r in records {
                w.serialize(r)?;
            }
            let bytes = w.into_inner().map_err(|e| SimError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        Format::Json => Ok(serde_json::to_string_pretty(records)? + "\n"),
    }
}

pub fn parse(text: &str, format: Format) -> SimResult<Vec<Record>> {
    match format {
        Format::Csv => Ok(csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>()?),
        Format::Json => Ok(serde_json::from_str(text)?),
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn emit_results(records: &[Record], path: Option<&Path>, format: Format) -> SimResult<()> {
    let text = render(records, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
