//! Synthetic rosters and corpora with known age and seniority effects, and
//! seeded sign-recovery experiments over the full pipeline.
//!
//! Latent yearly output is
//! `λ = exp(b0 + b_age (age - 60) + b_sen (seniority - 10) + b_gen gender + talent)`
//! with `talent ~ N(0, talent_sd)`. Publication counts are Poisson(λ t);
//! citations are Poisson with a gamma-distributed multiplier (negative
//! binomial), so they are overdispersed within each (year, category) cell.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Days, Months, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, LogNormal, Normal, Poisson, StandardNormal};

use crate::cohort::{cohort_percentiles, CohortEntry, CohortKey};
use crate::corpus::{
    derive_covariates, Author, Corpus, DateSpan, Gender, Professor, Publication, UniversityType,
};
use crate::credit::Convention;
use crate::error::{Error, Result};
use crate::indicators::{Indicator, MissingCellPolicy, ScalingTable, ScoringContext};
use crate::math::{correlation, exp, floor, mean, round, sample_sd};
use crate::regress::{fit_selected, ModelSpec, Observation, SolverOptions, Variable};

/// Age at which the age term of the latent rate is zero.
pub const AGE_REFERENCE: f64 = 60.0;
/// Seniority at which the seniority term of the latent rate is zero.
pub const SENIORITY_REFERENCE: f64 = 10.0;
/// Below this many professors the recovery report flags low power.
pub const LOW_POWER_PROFESSORS: usize = 200;
/// Youngest admissible appointment age in the generator.
pub const MIN_SIMULATED_APPOINTMENT_AGE: f64 = 25.0;

/// Census-age brackets `[lo, hi)` and their shares: almost nobody under 41,
/// a third over 65, an eighth over 70.
pub const AGE_BRACKETS: [(f64, f64, f64); 5] = [
    (36.0, 41.0, 0.005),
    (41.0, 51.0, 0.110),
    (51.0, 66.0, 0.555),
    (66.0, 71.0, 0.200),
    (71.0, 76.0, 0.130),
];

const PILOT_SIZE: usize = 20_000;
const PILOT_SEED: u64 = 0x0005_eed0_ca11_b8a7;
const MAX_REJECTIONS: usize = 256;
const UNIVERSITY_POOL: usize = 30;
const MAX_BYLINE: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldSpec {
    pub sds: String,
    pub uda: String,
    pub convention: Convention,
}

impl FieldSpec {
    pub fn new(sds: &str, uda: &str, convention: Convention) -> Self {
        Self {
            sds: sds.into(),
            uda: uda.into(),
            convention,
        }
    }

    /// Subject category the field publishes in.
    pub fn category(&self) -> String {
        format!("SC-{}", self.sds)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub n_professors: usize,
    /// Professors are spread uniformly over these fields.
    pub fields: Vec<FieldSpec>,
    /// Log-rate change per year of age.
    pub true_age_effect: f64,
    /// Log-rate change per year in rank.
    pub true_seniority_effect: f64,
    /// Log-rate shift for men.
    pub true_gender_effect: f64,
    /// Log publications per year at the reference age and seniority.
    pub baseline_log_rate: f64,
    /// Spread of unobserved individual productivity.
    pub talent_sd: f64,
    pub age_seniority_corr_target: f64,
    pub mean_appointment_age: f64,
    /// How strongly appointment age follows census age.
    pub appointment_age_slope: f64,
    /// Variance of the gamma citation multiplier; larger is more dispersed.
    pub citation_dispersion: f64,
    /// Expected citations gathered per year since publication.
    pub citations_per_year: f64,
    pub mean_coauthors: f64,
    pub male_share: f64,
    /// Shares of public, private, polytechnic and advanced-school professors.
    pub university_mix: [f64; 4],
    pub window_start: i32,
    pub window_end: i32,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_professors: 2000,
            fields: alloc::vec![
                FieldSpec::new("MAT/05", "MAT", Convention::Alphabetical),
                FieldSpec::new("FIS/01", "FIS", Convention::Alphabetical),
                FieldSpec::new("BIO/10", "BIO", Convention::PositionWeighted),
                FieldSpec::new("MED/09", "MED", Convention::PositionWeighted),
            ],
            true_age_effect: -0.04,
            true_seniority_effect: 0.04,
            true_gender_effect: 0.1,
            baseline_log_rate: 0.5,
            talent_sd: 0.8,
            age_seniority_corr_target: 0.7,
            mean_appointment_age: 47.0,
            appointment_age_slope: 0.5,
            citation_dispersion: 1.5,
            citations_per_year: 3.0,
            mean_coauthors: 3.0,
            male_share: 0.8,
            university_mix: [0.85, 0.07, 0.06, 0.02],
            window_start: 2006,
            window_end: 2010,
            seed: 1,
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("true_age_effect", self.true_age_effect),
            ("true_seniority_effect", self.true_seniority_effect),
            ("true_gender_effect", self.true_gender_effect),
            ("baseline_log_rate", self.baseline_log_rate),
            ("mean_appointment_age", self.mean_appointment_age),
            ("appointment_age_slope", self.appointment_age_slope),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(format!("{name} must be finite")));
            }
        }
        if self.age_seniority_corr_target.is_nan() || self.age_seniority_corr_target.abs() >= 1.0 {
            return Err(invalid(format!(
                "age_seniority_corr_target must lie in (-1, 1), got {}",
                self.age_seniority_corr_target
            )));
        }
        for (name, v) in [
            ("citation_dispersion", self.citation_dispersion),
            ("citations_per_year", self.citations_per_year),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("talent_sd", self.talent_sd),
            ("mean_coauthors", self.mean_coauthors),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.male_share) {
            return Err(invalid(format!(
                "male_share must lie in [0, 1], got {}",
                self.male_share
            )));
        }
        let mix_total: f64 = self.university_mix.iter().sum();
        if self.university_mix.iter().any(|s| s.is_nan() || *s < 0.0)
            || !mix_total.is_finite()
            || mix_total <= 0.0
        {
            return Err(invalid(
                "university_mix must be nonnegative with a positive sum".into(),
            ));
        }
        if self.window_end < self.window_start {
            return Err(invalid(format!(
                "window {}..{} is empty",
                self.window_start, self.window_end
            )));
        }
        if self.n_professors > 0 && self.fields.is_empty() {
            return Err(invalid("at least one field is required".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> Result<DateSpan> {
        DateSpan::years(self.window_start, self.window_end)
    }

    /// Census at the last day of the window.
    pub fn census_date(&self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.window_end, 12, 31).expect("valid year")
    }
}

fn draw_age<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let total: f64 = AGE_BRACKETS.iter().map(|b| b.2).sum();
    for &(lo, hi, share) in &AGE_BRACKETS {
        acc += share / total;
        if u < acc {
            return rng.random_range(lo..hi);
        }
    }
    let (lo, hi, _) = AGE_BRACKETS[AGE_BRACKETS.len() - 1];
    rng.random_range(lo..hi)
}

/// Appointment age around a line in census age, noise truncated to
/// `[MIN_SIMULATED_APPOINTMENT_AGE, age]`.
fn draw_appointment_age<R: Rng>(rng: &mut R, age: f64, noise_sd: f64, config: &SimConfig) -> f64 {
    let center =
        config.mean_appointment_age + config.appointment_age_slope * (age - mean_census_age());
    for _ in 0..MAX_REJECTIONS {
        let e: f64 = rng.sample(StandardNormal);
        let a = center + noise_sd * e;
        if (MIN_SIMULATED_APPOINTMENT_AGE..=age).contains(&a) {
            return a;
        }
    }
    center.clamp(MIN_SIMULATED_APPOINTMENT_AGE, age)
}

fn mean_census_age() -> f64 {
    let total: f64 = AGE_BRACKETS.iter().map(|b| b.2).sum();
    AGE_BRACKETS
        .iter()
        .map(|(lo, hi, s)| s / total * (lo + hi) / 2.0)
        .sum()
}

fn pilot_correlation(config: &SimConfig, noise_sd: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(PILOT_SEED);
    let mut ages = Vec::with_capacity(PILOT_SIZE);
    let mut seniority = Vec::with_capacity(PILOT_SIZE);
    for _ in 0..PILOT_SIZE {
        let age = draw_age(&mut rng);
        let a = draw_appointment_age(&mut rng, age, noise_sd, config);
        ages.push(age);
        seniority.push(age - a);
    }
    correlation(&ages, &seniority)
}

/// Appointment-age noise that makes corr(age, seniority) hit the target on a
/// fixed pilot sample. Correlation falls as the noise grows, so bisection
/// brackets the target or reports the attainable range.
pub fn calibrate_appointment_noise(config: &SimConfig) -> Result<f64> {
    let target = config.age_seniority_corr_target;
    let (mut lo, mut hi) = (0.0, 40.0);
    let c_lo = pilot_correlation(config, lo);
    let c_hi = pilot_correlation(config, hi);
    let (max, min) = (c_lo.max(c_hi), c_lo.min(c_hi));
    if !(target <= max && target >= min) {
        return Err(Error::InfeasibleCorrelation {
            target,
            low: min,
            high: max,
        });
    }
    let decreasing = c_lo >= c_hi;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let c = pilot_correlation(config, mid);
        if (c > target) == decreasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn date_before(date: NaiveDate, years: f64) -> NaiveDate {
    let whole = floor(years);
    let days = round((years - whole) * 365.0) as u64;
    date.checked_sub_months(Months::new(12 * whole as u32))
        .and_then(|d| d.checked_sub_days(Days::new(days)))
        .expect("date in range")
}

fn date_after(date: NaiveDate, years: f64) -> NaiveDate {
    let whole = floor(years);
    let days = round((years - whole) * 365.0) as u64;
    date.checked_add_months(Months::new(12 * whole as u32))
        .and_then(|d| d.checked_add_days(Days::new(days)))
        .expect("date in range")
}

fn pick_weighted<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean.is_nan() || mean <= 0.0 {
        return 0;
    }
    // rand_distr rejects means this large; counts there are meaningless anyway.
    let mean = mean.min(1e12);
    Poisson::new(mean)
        .map(|d| d.sample(rng) as u64)
        .unwrap_or(0)
}

fn generate_with_noise(
    config: &SimConfig,
    noise_sd: f64,
) -> Result<(Vec<Professor>, Vec<Publication>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let census = config.census_date();
    let t = config.window()?.length_years();
    let talent =
        Normal::new(0.0, config.talent_sd).map_err(|e| invalid(format!("talent_sd: {e}")))?;
    let shape = 1.0 / config.citation_dispersion;
    let multiplier = Gamma::new(shape, config.citation_dispersion)
        .map_err(|e| invalid(format!("citation_dispersion: {e}")))?;
    let impact = LogNormal::new(0.5, 0.6).expect("valid lognormal");
    let years = (config.window_end - config.window_start + 1) as usize;

    let mut roster = Vec::with_capacity(config.n_professors);
    let mut corpus = Vec::new();
    for i in 0..config.n_professors {
        let id = format!("P{:05}", i + 1);
        let field = &config.fields[rng.random_range(0..config.fields.len())];
        let age = draw_age(&mut rng);
        let appointment_age = draw_appointment_age(&mut rng, age, noise_sd, config);
        let gender = if rng.random::<f64>() < config.male_share {
            Gender::Male
        } else {
            Gender::Female
        };
        let university_type = UniversityType::ALL[pick_weighted(&mut rng, &config.university_mix)];
        let birth_date = date_before(census, age);
        let appointment_date = date_after(birth_date, appointment_age).min(census);
        let professor = Professor {
            id: id.clone(),
            gender,
            birth_date,
            appointment_date,
            sds: field.sds.clone(),
            uda: field.uda.clone(),
            university_type,
            active_span: None,
        };
        let seniority = age - appointment_age;
        let log_rate = config.baseline_log_rate
            + config.true_age_effect * (age - AGE_REFERENCE)
            + config.true_seniority_effect * (seniority - SENIORITY_REFERENCE)
            + config.true_gender_effect * gender.dummy() as f64
            + talent.sample(&mut rng);
        let count = poisson(&mut rng, exp(log_rate) * t);
        let home = format!("U{:02}", rng.random_range(0..UNIVERSITY_POOL));
        let category = field.category();
        for k in 0..count {
            let year = config.window_start + rng.random_range(0..years) as i32;
            let n_authors = (1 + poisson(&mut rng, config.mean_coauthors)).min(MAX_BYLINE) as usize;
            let own = rng.random_range(0..n_authors);
            let mut byline = Vec::with_capacity(n_authors);
            for j in 0..n_authors {
                if j == own {
                    byline.push(Author::new(id.clone(), home.clone()));
                } else {
                    let uni = if rng.random::<bool>() {
                        home.clone()
                    } else {
                        format!("U{:02}", rng.random_range(0..UNIVERSITY_POOL))
                    };
                    byline.push(Author::new(format!("X-{id}-{k}-{j}"), uni));
                }
            }
            let exposure = (config.window_end - year + 1) as f64;
            let m = multiplier.sample(&mut rng);
            let citations = poisson(&mut rng, config.citations_per_year * exposure * m);
            corpus.push(Publication {
                id: format!("W-{id}-{k}"),
                year,
                subject_category: category.clone(),
                journal_if: Some(impact.sample(&mut rng)),
                citations,
                byline,
                doc_type: "article".into(),
            });
        }
        roster.push(professor);
    }
    Ok((roster, corpus))
}

/// Deterministic synthetic roster and corpus for `config.seed`.
pub fn generate_cohort(config: &SimConfig) -> Result<(Vec<Professor>, Vec<Publication>)> {
    config.validate()?;
    if config.n_professors == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let noise = calibrate_appointment_noise(config)?;
    generate_with_noise(config, noise)
}

/// Outcome of the pipeline on one synthetic cohort.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunSummary {
    pub age_ame: f64,
    pub seniority_ame: f64,
    pub age_degree: u8,
    pub pseudo_r2: f64,
    pub corr_age_seniority: f64,
    pub inactive_fraction: f64,
    pub n_fitted: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunOutcome {
    pub run: usize,
    pub seed: u64,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

/// Scores, ranks and fits the FSS model on a generated cohort.
pub fn analyze_cohort(
    config: &SimConfig,
    roster: &[Professor],
    publications: Vec<Publication>,
) -> Result<RunSummary> {
    let window = config.window()?;
    let census = config.census_date();
    let conventions: BTreeMap<&str, Convention> = config
        .fields
        .iter()
        .map(|f| (f.sds.as_str(), f.convention))
        .collect();
    let scaling = ScalingTable::build(&publications);
    let corpus = Corpus::new(publications);
    let ctx = ScoringContext {
        corpus: &corpus,
        scaling: &scaling,
        window,
        policy: MissingCellPolicy::Lenient,
    };
    let mut warnings = Vec::new();
    let mut entries = Vec::with_capacity(roster.len());
    let mut covariates = BTreeMap::new();
    let mut inactive = 0usize;
    for prof in roster {
        let cov = derive_covariates(prof, census, &window)?;
        let convention = conventions
            .get(prof.sds.as_str())
            .copied()
            .ok_or_else(|| Error::UnresolvedConvention(prof.sds.clone()))?;
        let scores = ctx.score(prof, convention, cov.t, &mut warnings)?;
        if scores.inactive() {
            inactive += 1;
        }
        entries.push(CohortEntry {
            professor_id: prof.id.clone(),
            key: CohortKey::full_professors(prof.sds.clone()),
            value: Indicator::Fss.value(&scores),
        });
        covariates.insert(prof.id.clone(), cov);
    }
    let percentiles = cohort_percentiles(Indicator::Fss, &entries)?;
    let observations: Vec<Observation> = percentiles
        .iter()
        .map(|p| Observation::from_covariates(&covariates[&p.professor_id], p.percentile))
        .collect();
    let ages: Vec<f64> = observations.iter().map(|o| o.age).collect();
    let seniority: Vec<f64> = observations.iter().map(|o| o.seniority).collect();
    let selected = fit_selected(
        &observations,
        &ModelSpec::default(),
        &SolverOptions::default(),
    )?;
    let ame = |v: Variable| {
        selected
            .fit
            .ame_of(v)
            .ok_or_else(|| Error::UnknownVariable(v.name().into()))
    };
    Ok(RunSummary {
        age_ame: ame(Variable::Age)?,
        seniority_ame: ame(Variable::Seniority)?,
        age_degree: selected.degree,
        pseudo_r2: selected.fit.pseudo_r2,
        corr_age_seniority: correlation(&ages, &seniority),
        inactive_fraction: inactive as f64 / roster.len() as f64,
        n_fitted: selected.fit.n,
    })
}

/// A validated, calibrated experiment whose runs can execute in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryPlan {
    pub config: SimConfig,
    pub appointment_noise: f64,
}

impl RecoveryPlan {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let appointment_noise = if config.n_professors == 0 {
            0.0
        } else {
            calibrate_appointment_noise(config)?
        };
        Ok(Self {
            config: config.clone(),
            appointment_noise,
        })
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.config.seed.wrapping_add(run as u64)
    }

    /// Run `run` uses seed `base + run`.
    pub fn run(&self, run: usize) -> RunOutcome {
        let seed = self.run_seed(run);
        let config = SimConfig {
            seed,
            ..self.config.clone()
        };
        let result = generate_with_noise(&config, self.appointment_noise)
            .and_then(|(roster, pubs)| analyze_cohort(&config, &roster, pubs));
        match result {
            Ok(s) => RunOutcome {
                run,
                seed,
                summary: Some(s),
                error: None,
            },
            Err(e) => RunOutcome {
                run,
                seed,
                summary: None,
                error: Some(format!("{e}")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spread {
    pub mean: f64,
    pub sd: f64,
}

fn spread(values: &[f64]) -> Option<Spread> {
    (!values.is_empty()).then(|| Spread {
        mean: mean(values),
        sd: if values.len() > 1 {
            sample_sd(values)
        } else {
            0.0
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecoveryReport {
    pub n_runs: usize,
    pub n_succeeded: usize,
    pub true_age_effect: f64,
    pub true_seniority_effect: f64,
    /// Runs with a negative pooled age AME.
    pub age_negative: usize,
    pub age_positive: usize,
    pub seniority_positive: usize,
    pub seniority_negative: usize,
    /// Shares of all runs (failed runs count as not recovered).
    pub age_negative_fraction: f64,
    pub seniority_positive_fraction: f64,
    pub age_ame: Option<Spread>,
    pub seniority_ame: Option<Spread>,
    pub low_power: bool,
    pub runs: Vec<RunOutcome>,
}

impl RecoveryReport {
    /// Outcomes are ordered by run index regardless of input order.
    pub fn from_outcomes(config: &SimConfig, mut runs: Vec<RunOutcome>) -> Self {
        runs.sort_by_key(|r| r.run);
        let ok: Vec<&RunSummary> = runs.iter().filter_map(|r| r.summary.as_ref()).collect();
        let age: Vec<f64> = ok.iter().map(|s| s.age_ame).collect();
        let sen: Vec<f64> = ok.iter().map(|s| s.seniority_ame).collect();
        let n_runs = runs.len();
        let share = |k: usize| {
            if n_runs == 0 {
                0.0
            } else {
                k as f64 / n_runs as f64
            }
        };
        let age_negative = age.iter().filter(|a| **a < 0.0).count();
        let seniority_positive = sen.iter().filter(|a| **a > 0.0).count();
        Self {
            n_runs,
            n_succeeded: ok.len(),
            true_age_effect: config.true_age_effect,
            true_seniority_effect: config.true_seniority_effect,
            age_negative,
            age_positive: age.iter().filter(|a| **a > 0.0).count(),
            seniority_positive,
            seniority_negative: sen.iter().filter(|a| **a < 0.0).count(),
            age_negative_fraction: share(age_negative),
            seniority_positive_fraction: share(seniority_positive),
            age_ame: spread(&age),
            seniority_ame: spread(&sen),
            low_power: config.n_professors < LOW_POWER_PROFESSORS,
            runs,
        }
    }
}

/// Runs `n_runs` seeded replications serially. Per-run failures are recorded
/// and the remaining runs continue.
pub fn recovery_experiment(config: &SimConfig, n_runs: usize) -> Result<RecoveryReport> {
    if n_runs == 0 {
        return Err(invalid("at least one run is required".into()));
    }
    let plan = RecoveryPlan::new(config)?;
    let runs = (0..n_runs).map(|i| plan.run(i)).collect();
    Ok(RecoveryReport::from_outcomes(config, runs))
}

/// Mean age at census implied by [`AGE_BRACKETS`].
pub fn expected_census_age() -> f64 {
    mean_census_age()
}
