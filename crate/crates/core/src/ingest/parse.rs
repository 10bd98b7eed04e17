//! Dataset readers. Malformed rows become line errors and parsing continues.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use super::{IngestError, LineError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Jsonl,
    Csv,
}

impl FromStr for DatasetFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            other => Err(IngestError::UnknownFormat(other.to_string())),
        }
    }
}

impl DatasetFormat {
    /// Guesses from a file extension.
    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        path.extension()
            .and_then(|e| e.to_str())
            .ok_or_else(|| IngestError::UnknownFormat(path.display().to_string()))?
            .parse()
    }
}

/// One data row with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub source: String,
    pub source_line: usize,
    pub fields: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Parsed {
    pub records: Vec<RawRecord>,
    pub errors: Vec<LineError>,
}

impl Parsed {
    /// Rows seen, good or bad.
    pub fn input_count(&self) -> usize {
        self.records.len() + self.errors.len()
    }
}

pub fn parse_dataset(path: &Path, format: DatasetFormat) -> Result<Parsed, IngestError> {
    let bytes = std::fs::read(path)?;
    Ok(parse_bytes(&path.display().to_string(), &bytes, format))
}

pub fn parse_bytes(source: &str, bytes: &[u8], format: DatasetFormat) -> Parsed {
    match format {
        DatasetFormat::Jsonl => parse_jsonl(source, bytes),
        DatasetFormat::Csv => parse_csv(source, bytes),
    }
}

fn parse_jsonl(source: &str, bytes: &[u8]) -> Parsed {
    let mut out = Parsed::default();
    for (i, raw_line) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = i + 1;
        let raw_line = raw_line.strip_suffix(b"\r").unwrap_or(raw_line);
        if raw_line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        match flat_object(raw_line) {
            Ok(fields) => out.records.push(RawRecord {
                source: source.to_string(),
                source_line: line,
                fields,
            }),
            Err(reason) => out.errors.push(LineError { line, reason }),
        }
    }
    out
}

fn flat_object(line: &[u8]) -> Result<BTreeMap<String, String>, String> {
    let value: Json = serde_json::from_slice(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let Json::Object(map) = value else {
        return Err("line is not a JSON object".into());
    };
    let mut fields = BTreeMap::new();
    for (key, v) in map {
        let s = match v {
            Json::Null => continue,
            Json::String(s) => s,
            Json::Bool(b) => b.to_string(),
            Json::Number(n) => n.to_string(),
            Json::Array(_) | Json::Object(_) => {
                return Err(format!("field '{key}' is nested; records must be flat"))
            }
        };
        fields.insert(key, s);
    }
    Ok(fields)
}

fn parse_csv(source: &str, bytes: &[u8]) -> Parsed {
    let mut out = Parsed::default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            out.errors.push(LineError {
                line: 1,
                reason: format!("unreadable header row: {e}"),
            });
            return out;
        }
    };
    if headers.is_empty() {
        return out;
    }
    for row in reader.records() {
        match row {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line() as usize);
                if rec.len() != headers.len() {
                    out.errors.push(LineError {
                        line,
                        reason: format!("expected {} columns, found {}", headers.len(), rec.len()),
                    });
                    continue;
                }
                let fields = headers
                    .iter()
                    .zip(rec.iter())
                    .filter(|(_, v)| !v.is_empty())
                    .map(|(h, v)| (h.to_string(), v.to_string()))
                    .collect();
                out.records.push(RawRecord {
                    source: source.to_string(),
                    source_line: line,
                    fields,
                });
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                out.errors.push(LineError {
                    line,
                    reason: format!("malformed row: {e}"),
                });
            }
        }
    }
    out
}
