//! File formats. Every reader reports the offending path and, for tabular
//! input, the 1-based line of the bad record.

use std::fs;
use std::path::Path;

use crate::error::{AppError, Result};

pub mod config;
pub mod dumps;
pub mod maps;
pub mod publications;
pub mod roster;

pub(crate) fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| AppError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file))
}

/// Deserializes every record, attaching the record's line to errors from
/// parsing or from `convert`.
pub(crate) fn read_records<R, T>(
    path: &Path,
    mut convert: impl FnMut(R) -> std::result::Result<T, String>,
) -> Result<Vec<T>>
where
    R: serde::de::DeserializeOwned,
{
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| AppError::format(path, e))?
        .clone();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            AppError::row(path, line, e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parsed: R = record
            .deserialize(Some(&headers))
            .map_err(|e| AppError::row(path, line, e))?;
        out.push(convert(parsed).map_err(|m| AppError::row(path, line, m))?);
    }
    Ok(out)
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| AppError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| AppError::io(path, e))
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

/// Serializes rows to CSV in memory and writes them in one go.
pub(crate) fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| AppError::format(path, e))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| AppError::format(path, e.to_string()))?;
    write_file(path, &bytes)
}

/// CSV with an explicit header, for files whose rows may all be empty.
pub(crate) fn write_csv_with_header<T: serde::Serialize>(
    path: &Path,
    header: &[&str],
    rows: &[T],
) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer
        .write_record(header)
        .map_err(|e| AppError::format(path, e))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| AppError::format(path, e))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| AppError::format(path, e.to_string()))?;
    write_file(path, &bytes)
}

pub(crate) fn parse_date(s: &str) -> std::result::Result<chrono::NaiveDate, String> {
    chrono::NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| format!("bad date {s:?} (expected YYYY-MM-DD): {e}"))
}
