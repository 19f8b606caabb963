use std::path::Path;

use acadperf_core::corpus::{DateSpan, Gender, Professor, UniversityType};
use serde::{Deserialize, Serialize};

use super::{parse_date, read_records, write_csv};
use crate::error::Result;

/// One roster line. `active_start`/`active_end` may be blank, meaning active
/// for the whole observation window.
#[derive(Debug, Serialize, Deserialize)]
struct RosterRow {
    id: String,
    gender: String,
    birth_date: String,
    appointment_date: String,
    sds: String,
    uda: String,
    university_type: String,
    #[serde(default)]
    active_start: Option<String>,
    #[serde(default)]
    active_end: Option<String>,
}

fn blank(s: &Option<String>) -> Option<&str> {
    s.as_deref().map(str::trim).filter(|s| !s.is_empty())
}

fn to_professor(
    row: RosterRow,
    window: Option<&DateSpan>,
) -> std::result::Result<Professor, String> {
    let gender: Gender = row.gender.parse().map_err(|e| format!("{e}"))?;
    let university_type: UniversityType =
        row.university_type.parse().map_err(|e| format!("{e}"))?;
    let active_span = match (blank(&row.active_start), blank(&row.active_end)) {
        (None, None) => None,
        (start, end) => {
            let start = match start {
                Some(s) => parse_date(s)?,
                None => window
                    .map(|w| w.start)
                    .ok_or("active_end given without active_start")?,
            };
            let end = match end {
                Some(s) => parse_date(s)?,
                None => window
                    .map(|w| w.end)
                    .ok_or("active_start given without active_end")?,
            };
            Some(DateSpan::new(start, end).map_err(|e| e.to_string())?)
        }
    };
    let professor = Professor {
        id: row.id,
        gender,
        birth_date: parse_date(&row.birth_date)?,
        appointment_date: parse_date(&row.appointment_date)?,
        sds: row.sds,
        uda: row.uda,
        university_type,
        active_span,
    };
    professor.validate().map_err(|e| e.to_string())?;
    Ok(professor)
}

/// Reads a roster CSV. A half-open active span is closed with the window.
pub fn read_roster(path: &Path, window: Option<&DateSpan>) -> Result<Vec<Professor>> {
    read_records(path, |row: RosterRow| to_professor(row, window))
}

pub fn write_roster(path: &Path, roster: &[Professor]) -> Result<()> {
    let rows: Vec<RosterRow> = roster
        .iter()
        .map(|p| RosterRow {
            id: p.id.clone(),
            gender: p.gender.code().into(),
            birth_date: p.birth_date.to_string(),
            appointment_date: p.appointment_date.to_string(),
            sds: p.sds.clone(),
            uda: p.uda.clone(),
            university_type: p.university_type.to_string(),
            active_start: p.active_span.map(|s| s.start.to_string()),
            active_end: p.active_span.map(|s| s.end.to_string()),
        })
        .collect();
    write_csv(path, &rows)
}
