//! Indicator and simulator results checked against independent brute-force
//! computations.

use acadperf_core::corpus::{Author, Publication};
use acadperf_core::credit::{author_credit, Convention};
use acadperf_core::indicators::{
    compute_fss, compute_ij, Credited, MissingCellPolicy, ScalingTable,
};
use acadperf_core::sim::{recovery_experiment, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus(seed: u64, n: usize) -> Vec<Publication> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.random_range(1..=9);
            Publication {
                id: format!("W{i}"),
                year: 2006 + rng.random_range(0..2),
                subject_category: ["SC-A", "SC-B"][rng.random_range(0..2)].into(),
                journal_if: rng.random_bool(0.9).then(|| rng.random_range(0.2..6.0)),
                citations: if rng.random_bool(0.2) {
                    0
                } else {
                    rng.random_range(1..30)
                },
                byline: (0..len)
                    .map(|k| {
                        let id = if k == 0 || rng.random_bool(0.3) {
                            format!("P{}", rng.random_range(0..8))
                        } else {
                            format!("X{i}-{k}")
                        };
                        Author::new(id, format!("U{}", rng.random_range(0..2)))
                    })
                    .collect(),
                doc_type: "article".into(),
            }
        })
        .collect()
}

/// Written out longhand, one case per byline length class.
fn oracle_weight(byline: &[Author], pos: usize, convention: Convention) -> f64 {
    let n = byline.len();
    if n == 1 {
        return 1.0;
    }
    if convention == Convention::Alphabetical {
        return 1.0 / n as f64;
    }
    let ends = pos == 0 || pos == n - 1;
    if byline[0].university_id == byline[n - 1].university_id {
        match n {
            2 => 0.5,
            3 if ends => 0.4,
            3 => 0.2,
            _ if ends => 0.4,
            _ => 0.2 / (n - 2) as f64,
        }
    } else {
        let inner = pos == 1 || pos == n - 2;
        match n {
            2 => 0.5,
            3 if ends => 0.3 / 0.75,
            3 => 0.15 / 0.75,
            4 if ends => 0.3 / 0.9,
            4 => 0.15 / 0.9,
            _ if ends => 0.3,
            _ if inner => 0.15,
            _ => 0.1 / (n - 4) as f64,
        }
    }
}

fn oracle_credit(byline: &[Author], id: &str, convention: Convention) -> f64 {
    (0..byline.len())
        .filter(|&k| byline[k].author_id == id)
        .map(|k| oracle_weight(byline, k, convention))
        .sum()
}

fn oracle_mean_citations(pubs: &[Publication], year: i32, cat: &str) -> f64 {
    let cited: Vec<f64> = pubs
        .iter()
        .filter(|p| p.year == year && p.subject_category == cat && p.citations > 0)
        .map(|p| p.citations as f64)
        .collect();
    cited.iter().sum::<f64>() / cited.len() as f64
}

#[test]
fn credit_matches_longhand_weights() {
    for p in corpus(3, 400) {
        for a in &p.byline {
            for c in [Convention::Alphabetical, Convention::PositionWeighted] {
                let got = author_credit(&p.byline, &a.author_id, c);
                let want = oracle_credit(&p.byline, &a.author_id, c);
                assert!((got - want).abs() < 1e-12, "{} {c}: {got} vs {want}", p.id);
            }
        }
    }
}

#[test]
fn scaling_table_matches_brute_force() {
    let pubs = corpus(5, 300);
    let table = ScalingTable::build(&pubs);
    for year in [2006, 2007] {
        for cat in ["SC-A", "SC-B"] {
            let cell = table.cell(year, cat).unwrap();
            let want = oracle_mean_citations(&pubs, year, cat);
            assert!((cell.mean_citations.unwrap() - want).abs() < 1e-12);
            let ifs: Vec<f64> = pubs
                .iter()
                .filter(|p| p.year == year && p.subject_category == cat)
                .filter_map(|p| p.journal_if)
                .collect();
            let want_if = ifs.iter().sum::<f64>() / ifs.len() as f64;
            assert!((cell.mean_impact_factor.unwrap() - want_if).abs() < 1e-12);
        }
    }
}

#[test]
fn fss_and_ij_match_brute_force() {
    let pubs = corpus(7, 50);
    let scaling = ScalingTable::build(&pubs);
    let t = 3.5;
    for prof in 0..8 {
        let id = format!("P{prof}");
        for c in [Convention::Alphabetical, Convention::PositionWeighted] {
            let mine: Vec<&Publication> = pubs
                .iter()
                .filter(|p| p.byline.iter().any(|a| a.author_id == id))
                .collect();
            let items: Vec<Credited> = mine
                .iter()
                .map(|p| Credited {
                    publication: p,
                    credit: author_credit(&p.byline, &id, c),
                })
                .collect();
            let mut warnings = Vec::new();
            let policy = MissingCellPolicy::Lenient;
            let fss = compute_fss(&items, t, &scaling, policy, &mut warnings).unwrap();
            let want: f64 = mine
                .iter()
                .map(|p| {
                    p.citations as f64 / oracle_mean_citations(&pubs, p.year, &p.subject_category)
                        * oracle_credit(&p.byline, &id, c)
                })
                .sum::<f64>()
                / t;
            assert!((fss - want).abs() < 1e-12, "{id} {c}: {fss} vs {want}");

            let ij = compute_ij(&items, &scaling, policy, &mut warnings).unwrap();
            let ratios: Vec<f64> = mine
                .iter()
                .filter_map(|p| {
                    let jif = p.journal_if?;
                    let cell: Vec<f64> = pubs
                        .iter()
                        .filter(|q| q.year == p.year && q.subject_category == p.subject_category)
                        .filter_map(|q| q.journal_if)
                        .collect();
                    Some(jif / (cell.iter().sum::<f64>() / cell.len() as f64))
                })
                .collect();
            let want_ij =
                (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
            match (ij, want_ij) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                (a, b) => assert_eq!(a, b),
            }
        }
    }
}

#[test]
fn stronger_age_decline_gives_more_negative_ame() {
    let mut means = Vec::new();
    for effect in [-0.01, -0.04, -0.08] {
        let config = SimConfig {
            n_professors: 800,
            true_age_effect: effect,
            ..SimConfig::default()
        };
        let report = recovery_experiment(&config, 8).unwrap();
        assert_eq!(report.n_succeeded, 8);
        means.push(report.age_ame.unwrap().mean);
    }
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
}
