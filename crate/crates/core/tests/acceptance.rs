//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use acadperf_core::cohort::percentile_rank;
use acadperf_core::corpus::{Author, Publication};
use acadperf_core::credit::{author_credit, byline_weights, Convention};
use acadperf_core::indicators::{
    compute_fss, compute_ia, Credited, MissingCellPolicy, ScalingTable,
};
use acadperf_core::linalg::{dot, sup_norm, Matrix};
use acadperf_core::regress::qmle::score;
use acadperf_core::regress::{
    build_design, fit_fractional_logit, fit_model, fit_selected, FitResult, ModelSpec, Observation,
    SolverOptions, Term, Variable,
};
use acadperf_core::report::{regression_table, TableOptions, REGRESSION_ROWS};
use acadperf_core::sim::{recovery_experiment, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn byline(unis: &[usize]) -> Vec<Author> {
    unis.iter()
        .enumerate()
        .map(|(i, u)| Author::new(format!("A{i}"), format!("U{u}")))
        .collect()
}

fn check_weights(b: &[Author], worst: &mut f64, bad: &mut usize) {
    for c in [Convention::Alphabetical, Convention::PositionWeighted] {
        let w = byline_weights(b, c);
        let s: f64 = w.iter().sum();
        *worst = worst.max((s - 1.0).abs());
        if w.len() != b.len() || w.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            *bad += 1;
        }
    }
}

/// Restricted growth strings: every way to assign n authors to universities.
fn affiliation_patterns(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=max + 1 {
            cur[i] = v;
            rec(i + 1, max.max(v), cur, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut cur, &mut out);
    }
    out
}

fn credit_sums() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=12);
        let pool = rng.random_range(1..=n);
        let unis: Vec<usize> = (0..n).map(|_| rng.random_range(0..pool)).collect();
        check_weights(&byline(&unis), &mut worst, &mut bad);
    }
    let mut exhaustive = 0;
    for n in 1..=8 {
        for pattern in affiliation_patterns(n) {
            check_weights(&byline(&pattern), &mut worst, &mut bad);
            exhaustive += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && bad == 0 && elapsed < Duration::from_secs(5),
        format!(
            "10000 random + {exhaustive} exhaustive bylines, max |sum-1| = {worst:.1e}, bad shares = {bad}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn scheme_constants() -> Outcome {
    let a = byline_weights(&byline(&[0, 1, 2, 0]), Convention::PositionWeighted);
    let b = byline_weights(&byline(&[0, 1, 2, 3, 4, 5]), Convention::PositionWeighted);
    let pass = a == [0.40, 0.10, 0.10, 0.40] && b == [0.30, 0.15, 0.05, 0.05, 0.15, 0.30];
    outcome(
        pass,
        format!("n=4 same university {a:?}; n=6 different {b:?}"),
    )
}

const YEARS: [i32; 3] = [2006, 2007, 2008];
const CATEGORIES: [&str; 3] = ["SC-A", "SC-B", "SC-C"];

fn fixture_publications(rng: &mut ChaCha8Rng, n: usize, n_profs: usize) -> Vec<Publication> {
    (0..n)
        .map(|i| {
            let len = rng.random_range(1..=6);
            let authors = (0..len)
                .map(|k| {
                    let id = if rng.random_bool(0.6) {
                        format!("P{}", rng.random_range(0..n_profs))
                    } else {
                        format!("X{i}-{k}")
                    };
                    Author::new(id, format!("U{}", rng.random_range(0..3)))
                })
                .collect();
            Publication {
                id: format!("W{i}"),
                year: YEARS[rng.random_range(0..YEARS.len())],
                subject_category: CATEGORIES[rng.random_range(0..CATEGORIES.len())].into(),
                journal_if: Some(rng.random_range(0.5..8.0)),
                citations: rng.random_range(0..40),
                byline: authors,
                doc_type: "article".into(),
            }
        })
        .collect()
}

fn fss_ia(pubs: &[Publication], n_profs: usize) -> Vec<(f64, Option<f64>)> {
    let scaling = ScalingTable::build(pubs);
    let mut warnings = Vec::new();
    (0..n_profs)
        .map(|p| {
            let id = format!("P{p}");
            let items: Vec<Credited> = pubs
                .iter()
                .filter(|x| x.byline.iter().any(|a| a.author_id == id))
                .map(|x| Credited {
                    publication: x,
                    credit: author_credit(&x.byline, &id, Convention::PositionWeighted),
                })
                .collect();
            let policy = MissingCellPolicy::Lenient;
            let fss = compute_fss(&items, 5.0, &scaling, policy, &mut warnings).unwrap();
            let ia = compute_ia(&items, &scaling, policy, &mut warnings).unwrap();
            (fss, ia)
        })
        .collect()
}

fn scale_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n_profs = 30;
    let pubs = fixture_publications(&mut rng, 200, n_profs);
    let base = fss_ia(&pubs, n_profs);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for k in [2u64, 5, 10] {
        for year in YEARS {
            for cat in CATEGORIES {
                let scaled: Vec<Publication> = pubs
                    .iter()
                    .cloned()
                    .map(|mut p| {
                        if p.year == year && p.subject_category == cat {
                            p.citations *= k;
                        }
                        p
                    })
                    .collect();
                for ((f0, i0), (f1, i1)) in base.iter().zip(fss_ia(&scaled, n_profs)) {
                    worst = worst.max((f0 - f1).abs());
                    if let (Some(a), Some(b)) = (i0, i1) {
                        worst = worst.max((a - b).abs());
                    }
                    checks += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!(
            "{checks} professor checks over k in {{2,5,10}} x 9 cells, max |delta| = {worst:.1e}"
        ),
    )
}

fn midrank_oracle(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 1 {
        return vec![50.0];
    }
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            100.0 * (below + (equal - 1.0) / 2.0) / (n - 1) as f64
        })
        .collect()
}

fn percentile_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for c in 0..1000 {
        let n = rng.random_range(1..=60);
        let levels = rng.random_range(1..=n.max(2));
        let values: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..levels) as f64 * 0.37 - 3.0)
            .collect();
        let p = percentile_rank(&values).unwrap();
        let oracle = midrank_oracle(&values);
        let transformed: Vec<f64> = values.iter().map(|v| v.powi(3) + v.exp()).collect();
        let reversed: Vec<f64> = values.iter().map(|v| -v).collect();
        let pt = percentile_rank(&transformed).unwrap();
        let pr = percentile_rank(&reversed).unwrap();
        let mean = p.iter().sum::<f64>() / n as f64;
        for i in 0..n {
            worst = worst
                .max((p[i] - oracle[i]).abs())
                .max((p[i] - pt[i]).abs())
                .max((pr[i] - (100.0 - p[i])).abs());
        }
        worst = worst.max((mean - 50.0).abs());
        if worst > 1e-9 && failures.is_empty() {
            failures.push(c);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(5),
        format!(
            "1000 cohorts (oracle, monotone, reversal, mean 50), max deviation {worst:.1e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn solver_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let beta = [0.3, -0.8, 0.5, 0.25, -0.4, 0.6];
    let rows: Vec<Vec<f64>> = (0..500)
        .map(|_| {
            let mut r = vec![1.0];
            r.extend((0..5).map(|_| rng.random_range(-1.5..1.5)));
            r
        })
        .collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let y: Vec<f64> = rows.iter().map(|r| logistic(dot(r, &beta))).collect();
    let start = Instant::now();
    let fit = fit_fractional_logit(&y, &x, &SolverOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let err = fit
        .coefficients
        .iter()
        .zip(beta)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let grad = sup_norm(&score(&y, &x, &fit.coefficients));
    outcome(
        fit.converged && err < 1e-6 && grad < 1e-8 && elapsed < Duration::from_secs(1),
        format!(
            "max coefficient error {err:.1e}, gradient {grad:.1e}, {} iterations, {:.3}s",
            fit.iterations,
            elapsed.as_secs_f64()
        ),
    )
}

fn random_observation(rng: &mut ChaCha8Rng) -> Observation {
    let age = rng.random_range(35.0..75.0);
    let u = rng.random_range(0..4);
    Observation {
        age,
        seniority: rng.random_range(0.0..(age - 30.0)),
        gender: rng.random_bool(0.7) as u8 as f64,
        private: (u == 1) as u8 as f64,
        advanced_studies: (u == 2) as u8 as f64,
        polytechnic: (u == 3) as u8 as f64,
        response: 0.0,
    }
}

fn binomial_fraction(rng: &mut ChaCha8Rng, mu: f64, trials: u64) -> f64 {
    Binomial::new(trials, mu).unwrap().sample(rng) as f64 / trials as f64
}

fn ame_finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut models = 0;
    let mut cubic = 0;
    for m in 0..50 {
        let degree = 1 + (m % 3) as u8;
        let b_age = [
            rng.random_range(-0.05..0.05),
            rng.random_range(-0.002..0.002),
            rng.random_range(-1e-4..1e-4),
        ];
        let b = [
            rng.random_range(-0.5..0.5),
            rng.random_range(0.0..0.05),
            rng.random_range(-0.3..0.3),
        ];
        let mut obs: Vec<Observation> = (0..300).map(|_| random_observation(&mut rng)).collect();
        for o in &mut obs {
            let a = o.age - 55.0;
            let eta = b[0]
                + b_age[0] * a
                + b_age[1] * a * a
                + b_age[2] * a * a * a
                + b[1] * o.seniority
                + b[2] * o.gender
                - 0.2 * o.private
                + 0.1 * o.polytechnic;
            o.response = binomial_fraction(&mut rng, logistic(eta), 20);
        }
        let spec = ModelSpec::default();
        let design = build_design(&obs, &spec, degree).unwrap();
        let fit = fit_model(&design, &SolverOptions::default()).unwrap();
        let beta = fit_fractional_logit(&design.y, &design.x, &SolverOptions::default())
            .unwrap()
            .coefficients;
        let mu = |o: &Observation| logistic(dot(&design.row(o), &beta));
        for &(v, ame) in &fit.ame {
            let mut total = 0.0;
            for o in &design.observations {
                let (mut hi, mut lo) = (*o, *o);
                if v.is_dummy() {
                    hi.set(v, 1.0);
                    lo.set(v, 0.0);
                    total += mu(&hi) - mu(&lo);
                } else {
                    hi.set(v, o.value(v) + h);
                    lo.set(v, o.value(v) - h);
                    total += (mu(&hi) - mu(&lo)) / (2.0 * h);
                }
            }
            let numeric = 100.0 * total / design.n() as f64;
            worst = worst.max((numeric - ame).abs());
        }
        models += 1;
        if fit.terms.contains(&Term::AgePower(3)) {
            cubic += 1;
        }
    }
    outcome(
        worst <= 1e-6 && cubic > 0,
        format!("{models} models ({cubic} cubic in age), max |analytic - numeric| = {worst:.1e}"),
    )
}

fn aic_selection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let spec = ModelSpec {
        covariates: vec![Variable::Seniority, Variable::Gender],
        ..ModelSpec::default()
    };
    let mut picks = [[0usize; 4]; 2];
    for (truth, quadratic) in [(0usize, false), (1, true)] {
        for _ in 0..100 {
            let obs: Vec<Observation> = (0..1000)
                .map(|_| {
                    let mut o = random_observation(&mut rng);
                    let a = o.age - 55.0;
                    let curve = if quadratic { -0.004 * a * a } else { 0.0 };
                    let eta = 0.5 - 0.04 * a + curve + 0.03 * o.seniority + 0.1 * o.gender;
                    o.response = binomial_fraction(&mut rng, logistic(eta), 20);
                    o
                })
                .collect();
            let selected = fit_selected(&obs, &spec, &SolverOptions::default()).unwrap();
            picks[truth][selected.degree as usize] += 1;
        }
    }
    let linear = picks[0][1];
    let quad = picks[1][2];
    outcome(
        linear >= 90 && quad >= 90,
        format!(
            "linear truth -> degree 1 in {linear}/100; quadratic truth -> degree 2 in {quad}/100"
        ),
    )
}

fn recovery_and_fit() -> (Outcome, Outcome) {
    let config = SimConfig::default();
    let start = Instant::now();
    let report = recovery_experiment(&config, 100).unwrap();
    let elapsed = start.elapsed();
    let summaries: Vec<_> = report
        .runs
        .iter()
        .filter_map(|r| r.summary.as_ref())
        .collect();
    let both = summaries
        .iter()
        .filter(|s| s.age_ame < 0.0 && s.seniority_ame > 0.0)
        .count();
    let corr_ok = summaries
        .iter()
        .filter(|s| (s.corr_age_seniority - config.age_seniority_corr_target).abs() <= 0.05)
        .count();
    let (lo, hi) = summaries
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| {
            (l.min(s.corr_age_seniority), h.max(s.corr_age_seniority))
        });
    let low_r2 = summaries.iter().filter(|s| s.pseudo_r2 < 0.15).count();
    let max_r2 = summaries.iter().map(|s| s.pseudo_r2).fold(0.0, f64::max);
    let recovery = outcome(
        both >= 95 && corr_ok == 100 && elapsed < Duration::from_secs(60),
        format!(
            "age AME < 0 and seniority AME > 0 in {both}/100 runs (n=2000); corr in [{lo:.3}, {hi:.3}], {corr_ok}/100 within 0.05 of 0.7; {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
    let fit = outcome(
        low_r2 >= 90,
        format!("pseudo R-squared < 0.15 in {low_r2}/100 runs (max {max_r2:.4})"),
    );
    (recovery, fit)
}

fn table_fidelity() -> Outcome {
    let terms = vec![
        Term::Intercept,
        Term::AgePower(1),
        Term::AgePower(2),
        Term::Covariate(Variable::Seniority),
        Term::Covariate(Variable::Gender),
        Term::Covariate(Variable::Polytechnic),
        Term::Covariate(Variable::Private),
        Term::Covariate(Variable::AdvancedStudies),
    ];
    let fit = FitResult {
        coefficients: vec![
            319.192, -5.746, 0.021, -0.345, 16.757, -7.831, -61.732, 133.875,
        ],
        robust_se: vec![56.668, 1.09, 0.01, 0.9, 16.925, 26.677, 70.699, 55.908],
        classical_se: vec![1.0; 8],
        ame: vec![],
        age_degree: 2,
        age_center: 0.0,
        log_likelihood: -1.0,
        null_log_likelihood: -1.05,
        aic: 0.0,
        pseudo_r2: 0.0504,
        n: 1090,
        iterations: 5,
        gradient_sup_norm: 0.0,
        converged: true,
        dropped_terms: vec![],
        terms,
    };
    let table = regression_table("FSS", &[("MAT".into(), fit)], TableOptions::default()).unwrap();
    let labels: Vec<&str> = table.rows.iter().map(|r| r[0].as_str()).collect();
    let cell = |row: usize| table.rows[row][1].as_str();
    let pass = labels == REGRESSION_ROWS
        && cell(0) == "319.192 (56.668)"
        && cell(1) == "-5.746 (1.09)"
        && cell(3) == "-"
        && cell(9) == "0.0504"
        && cell(10) == "1,090";
    outcome(
        pass,
        format!(
            "intercept {:?}, age {:?}, rows {:?}",
            cell(0),
            cell(1),
            labels
        ),
    )
}

fn main() {
    let (recovery, low_fit) = recovery_and_fit();
    let results = [
        ("credit shares sum to one", credit_sums()),
        ("positional scheme constants", scheme_constants()),
        (
            "FSS and IA invariant to cell citation scaling",
            scale_invariance(),
        ),
        ("percentile rank properties", percentile_properties()),
        ("QMLE recovers noiseless coefficients", solver_recovery()),
        ("AME matches finite differences", ame_finite_differences()),
        ("AIC selects the true age degree", aic_selection()),
        ("simulated age and seniority effects recovered", recovery),
        ("low pseudo R-squared on simulated cohorts", low_fit),
        ("table cells and row order", table_fidelity()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        println!(
            "{} {name}: {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
        failed += usize::from(!r.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
