//! Fractional-response logit regression of percentile performance.
//!
//! The dependent variable is a percentile divided by 100, modelled as
//! `E(y | x) = G(xβ)` with `G` the logistic function and estimated by
//! maximizing the Bernoulli quasi-log-likelihood. Inference uses the sandwich
//! covariance. Age enters as a polynomial of degree 1..=3 picked by AIC; it is
//! mean-centered for conditioning and coefficients are reported back on the
//! raw-age scale.

pub mod ame;
pub mod collinearity;
pub mod design;
pub mod qmle;
pub mod select;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::Covariates;
use crate::error::{Error, Result};
use crate::indicators::Indicator;
use crate::linalg::Matrix;
use crate::math::sqrt;

pub use ame::{average_marginal_effect, average_marginal_effects};
pub use collinearity::{collinearity_check, CollinearityReport, VIF_THRESHOLD};
pub use design::{build_design, Design};
pub use qmle::{
    fit_fractional_logit, mcfadden_pseudo_r2, null_log_likelihood, quasi_log_likelihood, QmleFit,
    SolverOptions,
};
pub use select::{fit_selected, select_age_degree, DegreeCandidate, SelectedFit};

/// Highest polynomial degree of age considered.
pub const MAX_AGE_DEGREE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Age,
    Seniority,
    Gender,
    Polytechnic,
    Private,
    AdvancedStudies,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Age => "Age",
            Variable::Seniority => "Seniority",
            Variable::Gender => "Gender",
            Variable::Polytechnic => "Polytechnic",
            Variable::Private => "Private",
            Variable::AdvancedStudies => "Advanced Studies",
        }
    }

    /// 0/1 indicator variables take a discrete-contrast marginal effect.
    pub fn is_dummy(self) -> bool {
        !matches!(self, Variable::Age | Variable::Seniority)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "age" => Ok(Variable::Age),
            "seniority" => Ok(Variable::Seniority),
            "gender" => Ok(Variable::Gender),
            "u3" | "polytechnic" => Ok(Variable::Polytechnic),
            "u1" | "private" => Ok(Variable::Private),
            "u2" | "advancedstudies" | "advancedschool" => Ok(Variable::AdvancedStudies),
            _ => Err(Error::UnknownVariable(s.to_string())),
        }
    }
}

/// One column of the design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Intercept,
    /// Power of (centered) age.
    AgePower(u8),
    Covariate(Variable),
}

impl Term {
    pub fn variable(self) -> Option<Variable> {
        match self {
            Term::Intercept => None,
            Term::AgePower(_) => Some(Variable::Age),
            Term::Covariate(v) => Some(v),
        }
    }

    pub fn label(self) -> String {
        match self {
            Term::Intercept => "Intercept".into(),
            Term::AgePower(1) => "Age".into(),
            Term::AgePower(2) => "Age²".into(),
            Term::AgePower(3) => "Age³".into(),
            Term::AgePower(k) => format!("Age^{k}"),
            Term::Covariate(v) => v.name().into(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "Intercept" | "intercept" => return Ok(Term::Intercept),
            "Age²" | "Age ²" => return Ok(Term::AgePower(2)),
            "Age³" | "Age ³" => return Ok(Term::AgePower(3)),
            _ => {}
        }
        if let Some(k) = t.strip_prefix("Age^") {
            return k
                .parse::<u8>()
                .map(Term::AgePower)
                .map_err(|_| Error::UnknownVariable(t.to_string()));
        }
        match t.parse::<Variable>()? {
            Variable::Age => Ok(Term::AgePower(1)),
            v => Ok(Term::Covariate(v)),
        }
    }
}

impl From<Term> for String {
    fn from(t: Term) -> String {
        t.label()
    }
}

impl TryFrom<String> for Term {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Variable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Variable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One professor's regressors and fractional response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub age: f64,
    pub seniority: f64,
    pub gender: f64,
    pub private: f64,
    pub advanced_studies: f64,
    pub polytechnic: f64,
    /// Percentile / 100.
    pub response: f64,
}

impl Observation {
    pub fn from_covariates(c: &Covariates, percentile: f64) -> Self {
        Self {
            age: c.age,
            seniority: c.seniority,
            gender: c.gender as f64,
            private: c.u1 as f64,
            advanced_studies: c.u2 as f64,
            polytechnic: c.u3 as f64,
            response: percentile / 100.0,
        }
    }

    pub fn value(&self, v: Variable) -> f64 {
        match v {
            Variable::Age => self.age,
            Variable::Seniority => self.seniority,
            Variable::Gender => self.gender,
            Variable::Polytechnic => self.polytechnic,
            Variable::Private => self.private,
            Variable::AdvancedStudies => self.advanced_studies,
        }
    }

    pub fn set(&mut self, v: Variable, value: f64) {
        match v {
            Variable::Age => self.age = value,
            Variable::Seniority => self.seniority = value,
            Variable::Gender => self.gender = value,
            Variable::Polytechnic => self.polytechnic = value,
            Variable::Private => self.private = value,
            Variable::AdvancedStudies => self.advanced_studies = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ModelSpec {
    pub dependent: Indicator,
    pub max_degree: u8,
    /// Non-age regressors in column order.
    pub covariates: Vec<Variable>,
    /// Keep only observations with seniority strictly below this value.
    pub max_seniority: Option<f64>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            dependent: Indicator::Fss,
            max_degree: MAX_AGE_DEGREE,
            covariates: vec![
                Variable::Seniority,
                Variable::Gender,
                Variable::Polytechnic,
                Variable::Private,
                Variable::AdvancedStudies,
            ],
            max_seniority: None,
        }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_AGE_DEGREE).contains(&self.max_degree) {
            return Err(Error::InvalidSpec(format!(
                "age degree must be in 1..={MAX_AGE_DEGREE}, got {}",
                self.max_degree
            )));
        }
        for (i, v) in self.covariates.iter().enumerate() {
            if *v == Variable::Age {
                return Err(Error::InvalidSpec(
                    "age enters through the polynomial degree, not the covariate list".into(),
                ));
            }
            if self.covariates[..i].contains(v) {
                return Err(Error::InvalidSpec(format!("covariate {v} listed twice")));
            }
        }
        if let Some(m) = self.max_seniority {
            if !m.is_finite() {
                return Err(Error::InvalidSpec("max_seniority must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn includes(&self, obs: &Observation) -> bool {
        self.max_seniority.is_none_or(|m| obs.seniority < m)
    }
}

/// A fitted fractional-logit model in reporting form.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub terms: Vec<Term>,
    /// Raw-age scale.
    pub coefficients: Vec<f64>,
    /// Sandwich standard errors, raw-age scale.
    pub robust_se: Vec<f64>,
    /// Inverse-Hessian standard errors, raw-age scale.
    pub classical_se: Vec<f64>,
    /// Average marginal effects on the percentile (x100) scale; age pooled
    /// over its polynomial terms.
    pub ame: Vec<(Variable, f64)>,
    pub age_degree: u8,
    pub age_center: f64,
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    pub aic: f64,
    pub pseudo_r2: f64,
    pub n: usize,
    pub iterations: usize,
    pub gradient_sup_norm: f64,
    pub converged: bool,
    pub dropped_terms: Vec<Term>,
}

impl FitResult {
    fn index_of(&self, term: Term) -> Option<usize> {
        self.terms.iter().position(|t| *t == term)
    }

    pub fn coefficient(&self, term: Term) -> Option<f64> {
        self.index_of(term).map(|i| self.coefficients[i])
    }

    pub fn robust_se_of(&self, term: Term) -> Option<f64> {
        self.index_of(term).map(|i| self.robust_se[i])
    }

    pub fn ame_of(&self, v: Variable) -> Option<f64> {
        self.ame.iter().find(|(x, _)| *x == v).map(|(_, a)| *a)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Linear map from centered-age coefficients to raw-age coefficients:
/// `Σ_j b_j (a - m)^j = Σ_k c_k a^k`.
fn raw_age_transform(terms: &[Term], center: f64) -> Matrix {
    let p = terms.len();
    let mut t = Matrix::identity(p);
    let power_of = |term: &Term| match term {
        Term::Intercept => Some(0u32),
        Term::AgePower(k) => Some(*k as u32),
        Term::Covariate(_) => None,
    };
    for (r, tr) in terms.iter().enumerate() {
        let Some(k) = power_of(tr) else { continue };
        for (c, tc) in terms.iter().enumerate() {
            let Some(j) = power_of(tc) else { continue };
            t[(r, c)] = if j >= k {
                binomial(j, k) * crate::math::powi(-center, (j - k) as i32)
            } else {
                0.0
            };
        }
    }
    t
}

/// Fits the fractional logit on a built design and assembles the report.
pub fn fit_model(design: &Design, options: &SolverOptions) -> Result<FitResult> {
    let fit = fit_fractional_logit(&design.y, &design.x, options)?;
    let transform = raw_age_transform(&design.terms, design.age_center);
    let coefficients = transform.mul_vec(&fit.coefficients);
    let project = |cov: &Matrix| -> Result<Vec<f64>> {
        let v = transform.matmul(cov)?.matmul(&transform.transpose())?;
        Ok(v.diagonal().into_iter().map(|d| sqrt(d.max(0.0))).collect())
    };
    let robust_se = project(&fit.robust_cov)?;
    let classical_se = project(&fit.classical_cov)?;
    let null_ll = null_log_likelihood(&design.y)?;
    let pseudo_r2 = mcfadden_pseudo_r2(fit.log_likelihood, &design.y)?;
    let age_degree = design
        .terms
        .iter()
        .filter_map(|t| match t {
            Term::AgePower(k) => Some(*k),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    Ok(FitResult {
        terms: design.terms.clone(),
        coefficients,
        robust_se,
        classical_se,
        ame: average_marginal_effects(design, &fit.coefficients),
        age_degree,
        age_center: design.age_center,
        log_likelihood: fit.log_likelihood,
        null_log_likelihood: null_ll,
        aic: fit.aic(),
        pseudo_r2,
        n: design.y.len(),
        iterations: fit.iterations,
        gradient_sup_norm: fit.gradient_sup_norm,
        converged: fit.converged,
        dropped_terms: design.dropped_terms.clone(),
    })
}
