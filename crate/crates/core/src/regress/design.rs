use alloc::vec::Vec;

use super::collinearity::{collinearity_check, CollinearityReport};
use super::{ModelSpec, Observation, Term, Variable};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math::powi;

/// Response vector and design matrix for one model, after subset filtering
/// and collinearity pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub y: Vec<f64>,
    pub x: Matrix,
    /// Retained terms, one per column of `x`.
    pub terms: Vec<Term>,
    /// Mean age of the included observations; age powers use `age - center`.
    pub age_center: f64,
    pub observations: Vec<Observation>,
    pub dropped_terms: Vec<Term>,
    /// Variance inflation factors of retained non-constant terms.
    pub vifs: Vec<(Term, f64)>,
    pub collinearity: CollinearityReport,
}

pub(crate) fn term_value(term: Term, obs: &Observation, age_center: f64) -> f64 {
    match term {
        Term::Intercept => 1.0,
        Term::AgePower(k) => powi(obs.age - age_center, k as i32),
        Term::Covariate(v) => obs.value(v),
    }
}

impl Design {
    /// Design row for an arbitrary observation under this design's terms.
    pub fn row(&self, obs: &Observation) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| term_value(*t, obs, self.age_center))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn column_of(&self, term: Term) -> Option<usize> {
        self.terms.iter().position(|t| *t == term)
    }
}

/// Candidate terms before pruning: intercept, age powers, covariates.
pub fn candidate_terms(spec: &ModelSpec, age_degree: u8) -> Vec<Term> {
    let mut terms = Vec::with_capacity(1 + age_degree as usize + spec.covariates.len());
    terms.push(Term::Intercept);
    terms.extend((1..=age_degree).map(Term::AgePower));
    terms.extend(spec.covariates.iter().map(|v| Term::Covariate(*v)));
    terms
}

pub fn build_design(
    observations: &[Observation],
    spec: &ModelSpec,
    age_degree: u8,
) -> Result<Design> {
    spec.validate()?;
    if age_degree == 0 || age_degree > spec.max_degree {
        return Err(Error::InvalidSpec(alloc::format!(
            "age degree {age_degree} outside 1..={}",
            spec.max_degree
        )));
    }
    let included: Vec<Observation> = observations
        .iter()
        .filter(|o| spec.includes(o))
        .copied()
        .collect();
    if included.is_empty() {
        return Err(Error::EmptyDesign);
    }
    for o in &included {
        if !(0.0..=1.0).contains(&o.response) {
            return Err(Error::ResponseOutOfRange(o.response));
        }
        let values = [
            o.age,
            o.seniority,
            o.gender,
            o.private,
            o.advanced_studies,
            o.polytechnic,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("regressors"));
        }
    }
    let y: Vec<f64> = included.iter().map(|o| o.response).collect();
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::ConstantDependent);
    }
    let age_center = included.iter().map(|o| o.age).sum::<f64>() / included.len() as f64;
    let candidates = candidate_terms(spec, age_degree);
    let columns: Vec<Vec<f64>> = candidates
        .iter()
        .map(|t| {
            included
                .iter()
                .map(|o| term_value(*t, o, age_center))
                .collect()
        })
        .collect();
    let full = Matrix::from_columns(&columns)?;
    let exempt: Vec<bool> = candidates
        .iter()
        .map(|t| matches!(t, Term::Intercept | Term::AgePower(_)))
        .collect();
    let (report, x) = collinearity_check(&full, &exempt);
    let terms: Vec<Term> = report.kept.iter().map(|&j| candidates[j]).collect();
    let dropped_terms = report.dropped.iter().map(|&j| candidates[j]).collect();
    let vifs = report
        .vifs
        .iter()
        .map(|&(j, v)| (candidates[j], v))
        .collect();
    Ok(Design {
        y,
        x,
        terms,
        age_center,
        observations: included,
        dropped_terms,
        vifs,
        collinearity: report,
    })
}

/// Convenience: the variable a design term belongs to, for AME lookups.
pub fn variables_in(terms: &[Term]) -> Vec<Variable> {
    let mut out: Vec<Variable> = Vec::new();
    for v in terms.iter().filter_map(|t| t.variable()) {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}
