//! Checksummed JSON-lines files.
//!
//! Line 1 is a JSON header object carrying `format`, `version` and a
//! `checksum` field (`sha256:<hex>`) over the exact bytes of every line that
//! follows, trailing LF included. Any truncation or edit of the body is
//! therefore detected on read.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value as Json};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum FramingError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt file: {0}")]
    Corrupt(String),
}

fn corrupt(msg: impl Into<String>) -> FramingError {
    FramingError::Corrupt(msg.into())
}

pub fn checksum(body: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(body)))
}

/// Builds a framed file from header fields and body records.
pub fn encode<T: Serialize>(
    format: &str,
    version: u64,
    mut header: Map<String, Json>,
    records: &[T],
) -> Result<Vec<u8>, serde_json::Error> {
    let mut body = Vec::new();
    for record in records {
        serde_json::to_writer(&mut body, record)?;
        body.push(b'\n');
    }
    header.insert("format".into(), format.into());
    header.insert("version".into(), version.into());
    header.insert("checksum".into(), checksum(&body).into());
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    out.extend_from_slice(&body);
    Ok(out)
}

/// Verifies the frame and returns the header plus decoded records.
pub fn decode<T: DeserializeOwned>(
    bytes: &[u8],
    format: &str,
    version: u64,
) -> Result<(Map<String, Json>, Vec<T>), FramingError> {
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| corrupt("missing header line"))?;
    let (head, body) = (&bytes[..split], &bytes[split + 1..]);
    let header: Map<String, Json> =
        serde_json::from_slice(head).map_err(|e| corrupt(format!("bad header: {e}")))?;
    if header.get("format").and_then(Json::as_str) != Some(format) {
        return Err(corrupt(format!("expected format '{format}'")));
    }
    if header.get("version").and_then(Json::as_u64) != Some(version) {
        return Err(corrupt(format!("unsupported version, expected {version}")));
    }
    let stated = header
        .get("checksum")
        .and_then(Json::as_str)
        .ok_or_else(|| corrupt("header lacks checksum"))?;
    if stated != checksum(body) {
        return Err(corrupt("checksum mismatch"));
    }
    let text = std::str::from_utf8(body).map_err(|_| corrupt("body is not UTF-8"))?;
    let records = text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| corrupt(format!("line {}: {e}", i + 2)))
        })
        .collect::<Result<Vec<T>, _>>()?;
    Ok((header, records))
}

/// Writes via a sibling temp file and rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    {
        let mut file = fs::File::create(tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(tmp, path)
}

pub fn header_u64(header: &Map<String, Json>, key: &str) -> Result<u64, FramingError> {
    header
        .get(key)
        .and_then(Json::as_u64)
        .ok_or_else(|| corrupt(format!("header lacks '{key}'")))
}
