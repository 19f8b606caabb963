//! Table and distribution reports in the layout of the published tables.
//!
//! Numbers use a period decimal separator regardless of locale.
//! Coefficients and standard errors are rounded to 3 decimals with trailing
//! zeros trimmed; estimates get thousands separators. Percentages carry 2
//! fixed decimals, pseudo R-squared up to 4.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::corpus::Covariates;
use crate::error::{Error, Result};
use crate::math::{floor, mean, sample_sd};
use crate::regress::{FitResult, Term, Variable};

const ABSENT: &str = "-";

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn group_thousands(int_part: &str) -> String {
    let (sign, digits) = match int_part.strip_prefix('-') {
        Some(d) => ("-", d),
        None => ("", int_part),
    };
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    format!("{sign}{out}")
}

/// Rounds to `decimals`, trims trailing zeros, optionally groups thousands.
pub fn format_number(value: f64, decimals: usize, thousands: bool) -> String {
    let s = trim_fraction(format!("{value:.decimals$}"));
    if !thousands {
        return s;
    }
    match s.split_once('.') {
        Some((int, frac)) => format!("{}.{}", group_thousands(int), frac),
        None => group_thousands(&s),
    }
}

pub fn format_estimate(value: f64) -> String {
    format_number(value, 3, true)
}

pub fn format_se(value: f64) -> String {
    format_number(value, 3, false)
}

pub fn format_percent(value: f64) -> String {
    format!("{value:.2}")
}

pub fn format_pseudo_r2(value: f64) -> String {
    format_number(value, 4, false)
}

pub fn format_count(n: usize) -> String {
    group_thousands(&n.to_string())
}

/// `estimate (se)`, followed by ` [ame]` when given.
pub fn format_cell(estimate: f64, se: f64, ame: Option<f64>) -> String {
    let mut s = format!("{} ({})", format_estimate(estimate), format_se(se));
    if let Some(a) = ame {
        let _ = write!(s, " [{}]", format_estimate(a));
    }
    s
}

fn parse_number(s: &str) -> Result<f64> {
    let cleaned: String = s.trim().chars().filter(|c| *c != ',').collect();
    cleaned.parse::<f64>().map_err(|_| Error::Parse {
        what: "number",
        input: s.to_string(),
    })
}

/// Inverse of [`format_cell`], up to printed precision.
pub fn parse_cell(cell: &str) -> Result<(f64, f64, Option<f64>)> {
    let bad = || Error::Parse {
        what: "table cell",
        input: cell.to_string(),
    };
    let (est, rest) = cell.split_once('(').ok_or_else(bad)?;
    let (se, rest) = rest.split_once(')').ok_or_else(bad)?;
    let rest = rest.trim();
    let ame = if rest.is_empty() {
        None
    } else {
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        Some(parse_number(inner)?)
    };
    Ok((parse_number(est)?, parse_number(se)?, ame))
}

/// Row labels of the regression tables, in order.
pub const REGRESSION_ROWS: [&str; 11] = [
    "Intercept",
    "Age",
    "Age²",
    "Age³",
    "Seniority",
    "Gender",
    "Polytechnic",
    "Private",
    "Advanced Studies",
    "Pseudo R-squared",
    "N",
];

const COEFFICIENT_TERMS: [Term; 9] = [
    Term::Intercept,
    Term::AgePower(1),
    Term::AgePower(2),
    Term::AgePower(3),
    Term::Covariate(Variable::Seniority),
    Term::Covariate(Variable::Gender),
    Term::Covariate(Variable::Polytechnic),
    Term::Covariate(Variable::Private),
    Term::Covariate(Variable::AdvancedStudies),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TableOptions {
    /// Append `[AME]` to cells. Age's pooled AME goes on the linear row.
    pub show_ame: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in core::iter::once(&self.header).chain(&self.rows) {
            let line: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Space-aligned plain text; first column left-aligned, others right.
    pub fn to_text(&self) -> String {
        let ncol = self.header.len();
        let mut widths = vec![0usize; ncol];
        for row in core::iter::once(&self.header).chain(&self.rows) {
            for (j, c) in row.iter().enumerate().take(ncol) {
                widths[j] = widths[j].max(c.chars().count());
            }
        }
        let mut out = String::new();
        for row in core::iter::once(&self.header).chain(&self.rows) {
            let mut line = String::new();
            for (j, c) in row.iter().enumerate().take(ncol) {
                let pad = widths[j] - c.chars().count();
                if j == 0 {
                    line.push_str(c);
                    line.extend(core::iter::repeat_n(' ', pad));
                } else {
                    line.push_str("  ");
                    line.extend(core::iter::repeat_n(' ', pad));
                    line.push_str(c);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// Regression table: one column per group, fixed row order, absent terms `-`.
pub fn regression_table(
    dependent: &str,
    fits: &[(String, FitResult)],
    options: TableOptions,
) -> Result<Table> {
    for (group, fit) in fits {
        if !fit.converged {
            return Err(Error::UnconvergedFit(group.clone()));
        }
    }
    let mut header = vec![dependent.to_string()];
    header.extend(fits.iter().map(|(g, _)| g.clone()));
    let mut rows = Vec::with_capacity(REGRESSION_ROWS.len());
    for (label, term) in REGRESSION_ROWS.iter().zip(COEFFICIENT_TERMS) {
        let mut row = vec![label.to_string()];
        for (_, fit) in fits {
            let cell = match (fit.coefficient(term), fit.robust_se_of(term)) {
                (Some(est), Some(se)) => {
                    let ame = match term {
                        Term::AgePower(1) | Term::Covariate(_) if options.show_ame => {
                            term.variable().and_then(|v| fit.ame_of(v))
                        }
                        _ => None,
                    };
                    format_cell(est, se, ame)
                }
                _ => ABSENT.to_string(),
            };
            row.push(cell);
        }
        rows.push(row);
    }
    let mut r2 = vec![REGRESSION_ROWS[9].to_string()];
    r2.extend(fits.iter().map(|(_, f)| format_pseudo_r2(f.pseudo_r2)));
    rows.push(r2);
    let mut n = vec![REGRESSION_ROWS[10].to_string()];
    n.extend(fits.iter().map(|(_, f)| format_count(f.n)));
    rows.push(n);
    Ok(Table { header, rows })
}

/// One professor as seen by the descriptive tables.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveRecord {
    pub uda: String,
    pub covariates: Covariates,
    pub age_at_appointment: f64,
    pub inactive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveRow {
    pub uda: String,
    /// Population size when known, else the dataset size.
    pub total: usize,
    pub dataset: usize,
    pub coverage_pct: f64,
    pub mean_age: f64,
    pub mean_appointment_age: f64,
    pub inactive_pct: f64,
    /// Appointed before turning 41.
    pub appointed_before_41_pct: f64,
    /// Appointed at 56 or later (more than 55 completed years).
    pub appointed_after_55_pct: f64,
}

fn summarize(
    uda: &str,
    records: &[&DescriptiveRecord],
    population: Option<usize>,
) -> DescriptiveRow {
    let n = records.len();
    let pct = |count: usize| 100.0 * count as f64 / n as f64;
    let ages: Vec<f64> = records.iter().map(|r| r.covariates.age).collect();
    let appoint: Vec<f64> = records.iter().map(|r| r.age_at_appointment).collect();
    let total = population.unwrap_or(n).max(n);
    DescriptiveRow {
        uda: uda.to_string(),
        total,
        dataset: n,
        coverage_pct: 100.0 * n as f64 / total as f64,
        mean_age: mean(&ages),
        mean_appointment_age: mean(&appoint),
        inactive_pct: pct(records.iter().filter(|r| r.inactive).count()),
        appointed_before_41_pct: pct(appoint.iter().filter(|a| **a < 41.0).count()),
        appointed_after_55_pct: pct(appoint.iter().filter(|a| floor(**a) > 55.0).count()),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DescriptiveReport {
    /// Per UDA, then a final `Total` row.
    pub rows: Vec<DescriptiveRow>,
    pub warnings: Vec<String>,
}

/// Headcount, coverage, mean ages, inactivity and appointment-age shares by
/// UDA plus a total row. UDAs listed in `population` without professors are
/// omitted with a warning.
pub fn descriptive_table(
    records: &[DescriptiveRecord],
    population: &BTreeMap<String, usize>,
) -> DescriptiveReport {
    let mut by_uda: BTreeMap<&str, Vec<&DescriptiveRecord>> = BTreeMap::new();
    for r in records {
        by_uda.entry(r.uda.as_str()).or_default().push(r);
    }
    let mut report = DescriptiveReport::default();
    for uda in population.keys() {
        if !by_uda.contains_key(uda.as_str()) {
            report
                .warnings
                .push(format!("UDA {uda} has no professors; row omitted"));
        }
    }
    for (uda, members) in &by_uda {
        report
            .rows
            .push(summarize(uda, members, population.get(*uda).copied()));
    }
    if !records.is_empty() {
        let all: Vec<&DescriptiveRecord> = records.iter().collect();
        let pop_total = if population.is_empty() {
            None
        } else {
            Some(
                by_uda
                    .keys()
                    .map(|u| population.get(*u).copied().unwrap_or(by_uda[u].len()))
                    .sum(),
            )
        };
        report.rows.push(summarize("Total", &all, pop_total));
    }
    report
}

pub fn descriptive_tables(report: &DescriptiveReport) -> (Table, Table) {
    let header1 = [
        "UDA",
        "Total",
        "Dataset",
        "Coverage (%)",
        "Average age at census",
        "Average age at appointment",
        "Inactive (%)",
    ];
    let header2 = ["UDA", "Appointed before 41 (%)", "Appointed after 55 (%)"];
    let t1 = Table {
        header: header1.iter().map(|s| s.to_string()).collect(),
        rows: report
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.uda.clone(),
                    format_count(r.total),
                    format_count(r.dataset),
                    format_percent(r.coverage_pct),
                    format_percent(r.mean_age),
                    format_percent(r.mean_appointment_age),
                    format_percent(r.inactive_pct),
                ]
            })
            .collect(),
    };
    let t2 = Table {
        header: header2.iter().map(|s| s.to_string()).collect(),
        rows: report
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.uda.clone(),
                    format_percent(r.appointed_before_41_pct),
                    format_percent(r.appointed_after_55_pct),
                ]
            })
            .collect(),
    };
    (t1, t2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    /// Inclusive.
    pub lower: f64,
    /// Exclusive.
    pub upper: f64,
    pub count: usize,
    pub share: f64,
}

/// Left-closed bins of `bin_width`, aligned on multiples of the width and
/// spanning the data (empty interior bins included).
pub fn distribution_histogram(values: &[f64], bin_width: f64) -> Result<Vec<Bin>> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidBinWidth(bin_width));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput("histogram values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("histogram values"));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first = floor(min / bin_width) as i64;
    let last = floor(max / bin_width) as i64;
    let mut counts = vec![0usize; (last - first + 1) as usize];
    for v in values {
        let k = floor(v / bin_width) as i64 - first;
        counts[k as usize] += 1;
    }
    let n = values.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let k = first + i as i64;
            Bin {
                lower: k as f64 * bin_width,
                upper: (k + 1) as f64 * bin_width,
                count,
                share: count as f64 / n,
            }
        })
        .collect())
}

pub fn histogram_table(bins: &[Bin]) -> Table {
    Table {
        header: ["lower", "upper", "count", "share"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: bins
            .iter()
            .map(|b| {
                vec![
                    format!("{}", b.lower),
                    format!("{}", b.upper),
                    b.count.to_string(),
                    format!("{:.6}", b.share),
                ]
            })
            .collect(),
    }
}

/// Sample standard deviation over mean; `None` for fewer than two values or
/// a zero mean.
pub fn coefficient_of_variation(values: &[f64]) -> Option<f64> {
    let m = mean(values);
    let sd = sample_sd(values);
    (values.len() >= 2 && m != 0.0 && sd.is_finite()).then(|| sd / m)
}

pub fn group_cv_table(groups: &BTreeMap<String, Vec<f64>>) -> Table {
    let mut header = vec!["group".to_string()];
    let mut row = vec!["Coefficient of variation".to_string()];
    for (g, values) in groups {
        header.push(g.clone());
        row.push(
            coefficient_of_variation(values)
                .map(format_pseudo_r2)
                .unwrap_or_else(|| ABSENT.to_string()),
        );
    }
    Table {
        header,
        rows: vec![row],
    }
}
