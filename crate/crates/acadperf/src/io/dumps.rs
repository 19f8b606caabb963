//! Intermediate and final outputs: indicator, covariate and percentile
//! dumps, and fitted models.

use std::path::Path;

use acadperf_core::indicators::Indicator;
use acadperf_core::regress::{FitResult, Term, Variable};
use serde::{Deserialize, Serialize};

use super::{read_records, read_to_string, write_csv_with_header, write_file};
use crate::error::{AppError, Result};

/// Undefined indicators are written as empty fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub professor_id: String,
    pub sds: String,
    pub fss: Option<f64>,
    pub p: Option<f64>,
    pub ia: Option<f64>,
    pub ij: Option<f64>,
    pub n_pubs: usize,
    pub inactive_flag: u8,
}

pub const INDICATOR_HEADER: [&str; 8] = [
    "professor_id",
    "sds",
    "fss",
    "p",
    "ia",
    "ij",
    "n_pubs",
    "inactive_flag",
];

pub fn write_indicators(path: &Path, rows: &[IndicatorRow]) -> Result<()> {
    write_csv_with_header(path, &INDICATOR_HEADER, rows)
}

pub fn read_indicators(path: &Path) -> Result<Vec<IndicatorRow>> {
    read_records(path, Ok)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateRow {
    pub professor_id: String,
    pub sds: String,
    pub uda: String,
    pub age: f64,
    pub seniority: f64,
    pub gender: u8,
    pub u1: u8,
    pub u2: u8,
    pub u3: u8,
    pub t: f64,
}

pub const COVARIATE_HEADER: [&str; 10] = [
    "professor_id",
    "sds",
    "uda",
    "age",
    "seniority",
    "gender",
    "u1",
    "u2",
    "u3",
    "t",
];

pub fn write_covariates(path: &Path, rows: &[CovariateRow]) -> Result<()> {
    write_csv_with_header(path, &COVARIATE_HEADER, rows)
}

pub fn read_covariates(path: &Path) -> Result<Vec<CovariateRow>> {
    read_records(path, Ok)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileRow {
    pub professor_id: String,
    pub indicator: String,
    pub percentile: f64,
}

pub const PERCENTILE_HEADER: [&str; 3] = ["professor_id", "indicator", "percentile"];

pub fn write_percentiles(path: &Path, rows: &[PercentileRow]) -> Result<()> {
    write_csv_with_header(path, &PERCENTILE_HEADER, rows)
}

pub fn read_percentiles(path: &Path) -> Result<Vec<PercentileRow>> {
    read_records(path, |row: PercentileRow| {
        row.indicator
            .parse::<Indicator>()
            .map_err(|e| e.to_string())?;
        Ok(row)
    })
}

/// A fitted model labelled by group (UDA or `Total`) and dependent variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub group: String,
    pub dependent: Indicator,
    pub fit: FitResult,
}

/// Long-format fit line. `kind` is one of `coefficient`, `robust_se`,
/// `classical_se`, `ame`, `dropped` or `stat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FitLine {
    group: String,
    dependent: String,
    kind: String,
    name: String,
    value: String,
}

const FIT_HEADER: [&str; 5] = ["group", "dependent", "kind", "name", "value"];

const STATS: [&str; 10] = [
    "age_degree",
    "age_center",
    "log_likelihood",
    "null_log_likelihood",
    "aic",
    "pseudo_r2",
    "n",
    "iterations",
    "gradient_sup_norm",
    "converged",
];

fn stat_value(fit: &FitResult, name: &str) -> String {
    match name {
        "age_degree" => fit.age_degree.to_string(),
        "age_center" => fit.age_center.to_string(),
        "log_likelihood" => fit.log_likelihood.to_string(),
        "null_log_likelihood" => fit.null_log_likelihood.to_string(),
        "aic" => fit.aic.to_string(),
        "pseudo_r2" => fit.pseudo_r2.to_string(),
        "n" => fit.n.to_string(),
        "iterations" => fit.iterations.to_string(),
        "gradient_sup_norm" => fit.gradient_sup_norm.to_string(),
        "converged" => fit.converged.to_string(),
        _ => unreachable!("unknown stat {name}"),
    }
}

fn fit_lines(record: &FitRecord) -> Vec<FitLine> {
    let line = |kind: &str, name: String, value: String| FitLine {
        group: record.group.clone(),
        dependent: record.dependent.name().into(),
        kind: kind.into(),
        name,
        value,
    };
    let fit = &record.fit;
    let mut out = Vec::new();
    for (i, term) in fit.terms.iter().enumerate() {
        out.push(line(
            "coefficient",
            term.label(),
            fit.coefficients[i].to_string(),
        ));
        out.push(line(
            "robust_se",
            term.label(),
            fit.robust_se[i].to_string(),
        ));
        out.push(line(
            "classical_se",
            term.label(),
            fit.classical_se[i].to_string(),
        ));
    }
    for (v, a) in &fit.ame {
        out.push(line("ame", v.name().into(), a.to_string()));
    }
    for t in &fit.dropped_terms {
        out.push(line("dropped", t.label(), String::new()));
    }
    for s in STATS {
        out.push(line("stat", s.into(), stat_value(fit, s)));
    }
    out
}

pub fn write_fits_csv(path: &Path, records: &[FitRecord]) -> Result<()> {
    let lines: Vec<FitLine> = records.iter().flat_map(fit_lines).collect();
    write_csv_with_header(path, &FIT_HEADER, &lines)
}

fn empty_fit() -> FitResult {
    FitResult {
        terms: Vec::new(),
        coefficients: Vec::new(),
        robust_se: Vec::new(),
        classical_se: Vec::new(),
        ame: Vec::new(),
        age_degree: 0,
        age_center: 0.0,
        log_likelihood: 0.0,
        null_log_likelihood: 0.0,
        aic: 0.0,
        pseudo_r2: 0.0,
        n: 0,
        iterations: 0,
        gradient_sup_norm: 0.0,
        converged: false,
        dropped_terms: Vec::new(),
    }
}

fn apply_line(fit: &mut FitResult, line: &FitLine) -> std::result::Result<(), String> {
    let num = || {
        line.value
            .parse::<f64>()
            .map_err(|e| format!("{} {}: {e}", line.kind, line.name))
    };
    let term = || line.name.parse::<Term>().map_err(|e| e.to_string());
    match line.kind.as_str() {
        "coefficient" => {
            fit.terms.push(term()?);
            fit.coefficients.push(num()?);
        }
        "robust_se" => fit.robust_se.push(num()?),
        "classical_se" => fit.classical_se.push(num()?),
        "ame" => {
            let v: Variable = line
                .name
                .parse()
                .map_err(|e: acadperf_core::Error| e.to_string())?;
            fit.ame.push((v, num()?));
        }
        "dropped" => fit.dropped_terms.push(term()?),
        "stat" => {
            let int = || line.value.parse::<usize>().map_err(|e| e.to_string());
            match line.name.as_str() {
                "age_degree" => fit.age_degree = line.value.parse().map_err(|e| format!("{e}"))?,
                "age_center" => fit.age_center = num()?,
                "log_likelihood" => fit.log_likelihood = num()?,
                "null_log_likelihood" => fit.null_log_likelihood = num()?,
                "aic" => fit.aic = num()?,
                "pseudo_r2" => fit.pseudo_r2 = num()?,
                "n" => fit.n = int()?,
                "iterations" => fit.iterations = int()?,
                "gradient_sup_norm" => fit.gradient_sup_norm = num()?,
                "converged" => fit.converged = line.value.parse().map_err(|e| format!("{e}"))?,
                other => return Err(format!("unknown stat {other}")),
            }
        }
        other => return Err(format!("unknown line kind {other}")),
    }
    Ok(())
}

pub fn read_fits_csv(path: &Path) -> Result<Vec<FitRecord>> {
    let mut records: Vec<FitRecord> = Vec::new();
    read_records(path, |line: FitLine| {
        let dependent: Indicator = line.dependent.parse().map_err(|e| format!("{e}"))?;
        let same = records
            .last()
            .is_some_and(|r| r.group == line.group && r.dependent == dependent);
        if !same {
            records.push(FitRecord {
                group: line.group.clone(),
                dependent,
                fit: empty_fit(),
            });
        }
        let fit = &mut records.last_mut().expect("pushed above").fit;
        apply_line(fit, &line)
    })?;
    for r in &records {
        let p = r.fit.terms.len();
        if r.fit.robust_se.len() != p || r.fit.classical_se.len() != p {
            return Err(AppError::format(
                path,
                format!("group {}: standard errors do not match terms", r.group),
            ));
        }
    }
    Ok(records)
}

pub fn write_fits_json(path: &Path, records: &[FitRecord]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(records).map_err(|e| AppError::format(path, e))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn read_fits_json(path: &Path) -> Result<Vec<FitRecord>> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| AppError::format(path, e))
}
