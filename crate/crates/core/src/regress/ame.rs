//! Average marginal effects on the percentile scale.

use alloc::vec::Vec;

use super::design::{variables_in, Design};
use super::{Term, Variable};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::math::{logistic, powi};

/// AME of one variable, ×100 so it reads in percentile points.
///
/// Continuous variables average `g(xβ) ∂(xβ)/∂v` with `g = G (1 - G)`, pooling
/// every polynomial term of the variable. Dummies average the discrete
/// contrast `G(xβ | v = 1) - G(xβ | v = 0)`. `beta` is on the design's
/// (centered) scale.
pub fn variable_ame(design: &Design, beta: &[f64], variable: Variable) -> Result<f64> {
    let cols: Vec<(usize, Term)> = design
        .terms
        .iter()
        .enumerate()
        .filter(|(_, t)| t.variable() == Some(variable))
        .map(|(j, t)| (j, *t))
        .collect();
    if cols.is_empty() {
        return Err(Error::UnknownVariable(variable.name().into()));
    }
    let n = design.n();
    let mut total = 0.0;
    for (i, obs) in design.observations.iter().enumerate() {
        let eta = dot(design.x.row(i), beta);
        let effect = if variable.is_dummy() {
            let (j, _) = cols[0];
            let base = eta - beta[j] * design.x[(i, j)];
            logistic(base + beta[j]) - logistic(base)
        } else {
            let mu = logistic(eta);
            let slope: f64 = cols
                .iter()
                .map(|&(j, t)| match t {
                    Term::AgePower(k) => {
                        k as f64 * beta[j] * powi(obs.age - design.age_center, k as i32 - 1)
                    }
                    _ => beta[j],
                })
                .sum();
            mu * (1.0 - mu) * slope
        };
        total += effect;
    }
    Ok(100.0 * total / n as f64)
}

/// AMEs for every variable retained in the design, in term order.
pub fn average_marginal_effects(design: &Design, beta: &[f64]) -> Vec<(Variable, f64)> {
    variables_in(&design.terms)
        .into_iter()
        .filter_map(|v| variable_ame(design, beta, v).ok().map(|a| (v, a)))
        .collect()
}

/// AME looked up by variable name (`"Age"`, `"Seniority"`, `"U1"`, ...).
pub fn average_marginal_effect(design: &Design, beta: &[f64], name: &str) -> Result<f64> {
    let v: Variable = name.parse()?;
    variable_ame(design, beta, v)
}
