use std::path::Path;

use acadperf_core::corpus::{Author, Publication};
use serde::{Deserialize, Serialize};

use super::{read_records, read_to_string, write_csv};
use crate::error::{AppError, Result};

fn default_doc_type() -> String {
    "article".into()
}

/// A byline is `author@university` entries, either `;`-joined or a list.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Byline {
    Joined(String),
    List(Vec<String>),
}

#[derive(Debug, Serialize, Deserialize)]
struct PublicationRow {
    id: String,
    year: i32,
    subject_category: String,
    #[serde(default)]
    journal_if: Option<f64>,
    citations: i64,
    byline: Byline,
    #[serde(default = "default_doc_type")]
    doc_type: String,
}

fn to_publication(row: PublicationRow) -> std::result::Result<Publication, String> {
    if row.citations < 0 {
        return Err(format!(
            "publication {}: negative citation count {}",
            row.id, row.citations
        ));
    }
    let entries: Vec<String> = match row.byline {
        Byline::Joined(s) => s
            .split(';')
            .map(|e| e.trim().to_string())
            .filter(|e| !e.is_empty())
            .collect(),
        Byline::List(v) => v,
    };
    let byline = entries
        .iter()
        .map(|e| {
            e.parse::<Author>()
                .map_err(|err| format!("publication {}: {err}", row.id))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let publication = Publication {
        id: row.id,
        year: row.year,
        subject_category: row.subject_category,
        journal_if: row.journal_if,
        citations: row.citations as u64,
        byline,
        doc_type: row.doc_type,
    };
    publication.validate().map_err(|e| e.to_string())?;
    Ok(publication)
}

fn is_jsonl(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl" | "ndjson")
    )
}

/// Reads publications from CSV, or from JSON Lines when the extension is
/// `.jsonl`/`.ndjson`. Rows are returned unfiltered.
pub fn read_publications(path: &Path) -> Result<Vec<Publication>> {
    if !is_jsonl(path) {
        return read_records(path, to_publication);
    }
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i as u64 + 1;
        let row: PublicationRow =
            serde_json::from_str(line).map_err(|e| AppError::row(path, line_no, e))?;
        out.push(to_publication(row).map_err(|m| AppError::row(path, line_no, m))?);
    }
    Ok(out)
}

pub fn write_publications(path: &Path, publications: &[Publication]) -> Result<()> {
    let rows: Vec<PublicationRow> = publications
        .iter()
        .map(|p| PublicationRow {
            id: p.id.clone(),
            year: p.year,
            subject_category: p.subject_category.clone(),
            journal_if: p.journal_if,
            citations: p.citations as i64,
            byline: Byline::Joined(
                p.byline
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            doc_type: p.doc_type.clone(),
        })
        .collect();
    write_csv(path, &rows)
}
