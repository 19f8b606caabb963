//! The compute, regress, simulate and report stages over in-memory data.
//! Per-professor scoring, per-group fits and simulation runs go through
//! rayon; results are always reassembled in a fixed order.

use std::collections::{BTreeMap, BTreeSet};

use acadperf_core::cohort::{cohort_percentiles, CohortEntry, CohortKey};
use acadperf_core::corpus::{
    derive_covariates, validate_roster, AuthorResolution, Corpus, Covariates, DateSpan,
    IngestReport, Professor, Publication,
};
use acadperf_core::credit::ConventionMap;
use acadperf_core::indicators::{Indicator, MissingCellPolicy, ScalingTable, ScoringContext};
use acadperf_core::regress::{fit_selected, ModelSpec, Observation, SolverOptions};
use acadperf_core::report::{
    coefficient_of_variation, descriptive_table, descriptive_tables, distribution_histogram,
    histogram_table, regression_table, DescriptiveRecord, Table, TableOptions,
};
use acadperf_core::sim::{RecoveryPlan, RecoveryReport, SimConfig};
use chrono::NaiveDate;
use rayon::prelude::*;

use crate::error::{AppError, Result};
use crate::io::dumps::{CovariateRow, FitRecord, IndicatorRow, PercentileRow};

pub const TOTAL_GROUP: &str = "Total";

#[derive(Debug, Clone)]
pub struct ComputeSettings {
    pub census: NaiveDate,
    pub window: DateSpan,
    pub conventions: ConventionMap,
    pub sds_map: Option<BTreeMap<String, String>>,
    pub excluded_doc_types: BTreeSet<String>,
    /// Unknown authors and missing scaling cells become errors.
    pub strict: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComputeOutput {
    pub indicators: Vec<IndicatorRow>,
    pub covariates: Vec<CovariateRow>,
    pub percentiles: Vec<PercentileRow>,
    pub warnings: Vec<String>,
    pub ingest: IngestReport,
}

struct Scored {
    professor: usize,
    covariates: Covariates,
    scores: acadperf_core::indicators::IndicatorScores,
    warnings: Vec<String>,
}

/// Ingest, credit, indicators and cohort percentiles for a roster.
pub fn compute(
    roster: &[Professor],
    publications: Vec<Publication>,
    settings: &ComputeSettings,
) -> Result<ComputeOutput> {
    validate_roster(roster, settings.sds_map.as_ref()).map_err(AppError::stage("roster"))?;
    let ids: BTreeSet<String> = roster.iter().map(|p| p.id.clone()).collect();
    let resolution = if settings.strict {
        AuthorResolution::Strict
    } else {
        AuthorResolution::Lenient
    };
    let (corpus, ingest) = Corpus::assemble(
        publications,
        &settings.excluded_doc_types,
        Some(&ids),
        resolution,
    )
    .map_err(AppError::stage("ingest"))?;
    let scaling = ScalingTable::build(corpus.publications());
    let ctx = ScoringContext {
        corpus: &corpus,
        scaling: &scaling,
        window: settings.window,
        policy: if settings.strict {
            MissingCellPolicy::Strict
        } else {
            MissingCellPolicy::Lenient
        },
    };

    let scored: Vec<Scored> = roster
        .par_iter()
        .enumerate()
        .map(|(i, prof)| {
            let covariates = derive_covariates(prof, settings.census, &settings.window)
                .map_err(AppError::stage("covariates"))?;
            let convention = settings
                .conventions
                .resolve(&prof.sds, &prof.uda)
                .map_err(AppError::stage("credit"))?;
            let mut warnings = Vec::new();
            let scores = ctx
                .score(prof, convention, covariates.t, &mut warnings)
                .map_err(AppError::stage("indicators"))?;
            Ok(Scored {
                professor: i,
                covariates,
                scores,
                warnings: warnings.iter().map(|w| w.to_string()).collect(),
            })
        })
        .collect::<Result<_>>()?;

    let mut warnings = BTreeSet::new();
    let mut out = ComputeOutput {
        ingest,
        ..ComputeOutput::default()
    };
    for s in &scored {
        let prof = &roster[s.professor];
        warnings.extend(s.warnings.iter().cloned());
        out.indicators.push(IndicatorRow {
            professor_id: prof.id.clone(),
            sds: prof.sds.clone(),
            fss: Indicator::Fss.value(&s.scores),
            p: Indicator::P.value(&s.scores),
            ia: Indicator::Ia.value(&s.scores),
            ij: Indicator::Ij.value(&s.scores),
            n_pubs: s.scores.n_pubs,
            inactive_flag: s.scores.inactive() as u8,
        });
        let c = &s.covariates;
        out.covariates.push(CovariateRow {
            professor_id: prof.id.clone(),
            sds: prof.sds.clone(),
            uda: prof.uda.clone(),
            age: c.age,
            seniority: c.seniority,
            gender: c.gender,
            u1: c.u1,
            u2: c.u2,
            u3: c.u3,
            t: c.t,
        });
    }
    for indicator in Indicator::ALL {
        let entries: Vec<CohortEntry> = scored
            .iter()
            .map(|s| {
                let prof = &roster[s.professor];
                CohortEntry {
                    professor_id: prof.id.clone(),
                    key: CohortKey::full_professors(prof.sds.clone()),
                    value: indicator.value(&s.scores),
                }
            })
            .collect();
        let ranked = cohort_percentiles(indicator, &entries).map_err(AppError::stage("cohort"))?;
        out.percentiles
            .extend(ranked.into_iter().map(|p| PercentileRow {
                professor_id: p.professor_id,
                indicator: indicator.name().into(),
                percentile: p.percentile,
            }));
    }
    out.indicators
        .sort_by(|a, b| a.professor_id.cmp(&b.professor_id));
    out.covariates
        .sort_by(|a, b| a.professor_id.cmp(&b.professor_id));
    out.percentiles.sort_by(|a, b| {
        (
            &a.professor_id,
            Indicator::ALL.iter().position(|i| i.name() == a.indicator),
        )
            .cmp(&(
                &b.professor_id,
                Indicator::ALL.iter().position(|i| i.name() == b.indicator),
            ))
    });
    out.warnings = warnings.into_iter().collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressOutput {
    /// Successful fits: `Total` first, then UDAs in name order.
    pub fits: Vec<FitRecord>,
    /// Groups whose fit failed, with the reason.
    pub failures: Vec<(String, String)>,
    pub table: Table,
}

fn observation(row: &CovariateRow, percentile: f64) -> Observation {
    let c = Covariates {
        age: row.age,
        seniority: row.seniority,
        gender: row.gender,
        u1: row.u1,
        u2: row.u2,
        u3: row.u3,
        t: row.t,
    };
    Observation::from_covariates(&c, percentile)
}

/// Fits the model for the whole population and for each UDA, selecting the
/// age degree by AIC in each group.
pub fn regress(
    covariates: &[CovariateRow],
    percentiles: &[PercentileRow],
    spec: &ModelSpec,
    solver: &SolverOptions,
    table_options: TableOptions,
) -> Result<RegressOutput> {
    spec.validate().map_err(AppError::stage("model"))?;
    let dependent = spec.dependent.name();
    let scores: BTreeMap<&str, f64> = percentiles
        .iter()
        .filter(|p| p.indicator.eq_ignore_ascii_case(dependent))
        .map(|p| (p.professor_id.as_str(), p.percentile))
        .collect();
    let mut groups: BTreeMap<String, Vec<Observation>> = BTreeMap::new();
    let mut total = Vec::new();
    for row in covariates {
        if let Some(p) = scores.get(row.professor_id.as_str()) {
            let obs = observation(row, *p);
            total.push(obs);
            groups.entry(row.uda.clone()).or_default().push(obs);
        }
    }
    let ordered: Vec<(String, Vec<Observation>)> =
        std::iter::once((TOTAL_GROUP.to_string(), total))
            .chain(groups)
            .collect();
    let results: Vec<(String, std::result::Result<FitRecord, String>)> = ordered
        .par_iter()
        .map(|(group, obs)| {
            let outcome = fit_selected(obs, spec, solver)
                .map(|s| FitRecord {
                    group: group.clone(),
                    dependent: spec.dependent,
                    fit: s.fit,
                })
                .map_err(|e| e.to_string());
            (group.clone(), outcome)
        })
        .collect();
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for (group, r) in results {
        match r {
            Ok(f) if f.fit.converged => fits.push(f),
            Ok(_) => failures.push((group, "fit did not converge".into())),
            Err(e) => failures.push((group, e)),
        }
    }
    let labelled: Vec<(String, acadperf_core::regress::FitResult)> = fits
        .iter()
        .map(|f| (f.group.clone(), f.fit.clone()))
        .collect();
    let table =
        regression_table(dependent, &labelled, table_options).map_err(AppError::stage("report"))?;
    Ok(RegressOutput {
        fits,
        failures,
        table,
    })
}

/// Runs the recovery experiment with runs spread over the rayon pool.
pub fn simulate(config: &SimConfig, runs: usize) -> Result<RecoveryReport> {
    if runs == 0 {
        return Err(AppError::Usage("--runs must be at least 1".into()));
    }
    let plan = RecoveryPlan::new(config).map_err(AppError::stage("simulate"))?;
    let outcomes = (0..runs).into_par_iter().map(|i| plan.run(i)).collect();
    Ok(RecoveryReport::from_outcomes(config, outcomes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOutput {
    pub headcount: Table,
    pub appointment_age: Table,
    pub age_histogram: Table,
    /// Coefficient of variation of raw FSS per SDS.
    pub fss_dispersion: Table,
    pub warnings: Vec<String>,
}

/// Descriptive tables from compute dumps.
pub fn describe(
    covariates: &[CovariateRow],
    indicators: &[IndicatorRow],
    population: &BTreeMap<String, usize>,
    bin_width: f64,
) -> Result<ReportOutput> {
    let inactive: BTreeMap<&str, bool> = indicators
        .iter()
        .map(|r| (r.professor_id.as_str(), r.inactive_flag != 0))
        .collect();
    let records: Vec<DescriptiveRecord> = covariates
        .iter()
        .map(|r| DescriptiveRecord {
            uda: r.uda.clone(),
            covariates: Covariates {
                age: r.age,
                seniority: r.seniority,
                gender: r.gender,
                u1: r.u1,
                u2: r.u2,
                u3: r.u3,
                t: r.t,
            },
            age_at_appointment: r.age - r.seniority,
            inactive: inactive
                .get(r.professor_id.as_str())
                .copied()
                .unwrap_or(false),
        })
        .collect();
    let summary = descriptive_table(&records, population);
    let (headcount, appointment_age) = descriptive_tables(&summary);
    let ages: Vec<f64> = covariates.iter().map(|r| r.age).collect();
    let bins = distribution_histogram(&ages, bin_width).map_err(AppError::stage("report"))?;
    let mut fss_by_sds: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in indicators {
        if let Some(v) = r.fss {
            fss_by_sds.entry(r.sds.clone()).or_default().push(v);
        }
    }
    let fss_dispersion = Table {
        header: vec!["SDS".into(), "N".into(), "Mean FSS".into(), "CV".into()],
        rows: fss_by_sds
            .iter()
            .map(|(sds, v)| {
                vec![
                    sds.clone(),
                    v.len().to_string(),
                    format!("{:.3}", v.iter().sum::<f64>() / v.len() as f64),
                    coefficient_of_variation(v)
                        .map(|cv| format!("{cv:.3}"))
                        .unwrap_or_else(|| "-".into()),
                ]
            })
            .collect(),
    };
    Ok(ReportOutput {
        headcount,
        appointment_age,
        age_histogram: histogram_table(&bins),
        fss_dispersion,
        warnings: summary.warnings,
    })
}
