//! AIC choice of the age polynomial degree.

use alloc::vec::Vec;

use super::design::{build_design, Design};
use super::{fit_model, FitResult, ModelSpec, Observation, SolverOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeCandidate {
    pub degree: u8,
    pub outcome: core::result::Result<f64, Error>,
}

impl DegreeCandidate {
    pub fn aic(&self) -> Option<f64> {
        self.outcome.as_ref().ok().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectedFit {
    pub degree: u8,
    pub fit: FitResult,
    pub design: Design,
    pub candidates: Vec<DegreeCandidate>,
}

/// Fits degrees `1..=spec.max_degree` and keeps the minimum-AIC model; ties
/// go to the lower degree. Fails only if every degree fails, with the error
/// of the lowest degree.
pub fn fit_selected(
    observations: &[Observation],
    spec: &ModelSpec,
    options: &SolverOptions,
) -> Result<SelectedFit> {
    spec.validate()?;
    let mut best: Option<(u8, FitResult, Design)> = None;
    let mut candidates = Vec::new();
    let mut first_error = None;
    for degree in 1..=spec.max_degree {
        let attempt = build_design(observations, spec, degree)
            .and_then(|d| fit_model(&d, options).map(|f| (f, d)));
        match attempt {
            Ok((fit, design)) => {
                candidates.push(DegreeCandidate {
                    degree,
                    outcome: Ok(fit.aic),
                });
                let better = best.as_ref().is_none_or(|(_, b, _)| fit.aic < b.aic);
                if better {
                    best = Some((degree, fit, design));
                }
            }
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e.clone());
                }
                candidates.push(DegreeCandidate {
                    degree,
                    outcome: Err(e),
                });
            }
        }
    }
    match best {
        Some((degree, fit, design)) => Ok(SelectedFit {
            degree,
            fit,
            design,
            candidates,
        }),
        None => Err(first_error.unwrap_or(Error::EmptyDesign)),
    }
}

pub fn select_age_degree(
    observations: &[Observation],
    spec: &ModelSpec,
    options: &SolverOptions,
) -> Result<u8> {
    fit_selected(observations, spec, options).map(|s| s.degree)
}
