//! Percentile scaling within same-field, same-rank cohorts.
//!
//! Ranks use midranks for ties and map onto `100 (r - 1) / (n - 1)`, so the
//! worst member scores 0, the best 100, and every cohort averages 50.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::indicators::Indicator;

/// Academic rank of a cohort. Rosters here hold full professors only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Rank {
    #[default]
    Full,
    Associate,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CohortKey {
    pub sds: String,
    pub rank: Rank,
}

impl CohortKey {
    pub fn full_professors(sds: impl Into<String>) -> Self {
        Self {
            sds: sds.into(),
            rank: Rank::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PercentileScore {
    pub professor_id: String,
    pub indicator: Indicator,
    pub percentile: f64,
}

/// Percentile of each value within its cohort, in input order.
pub fn percentile_rank(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyCohort);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("cohort scores"));
    }
    if n == 1 {
        return Ok(vec![50.0]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // zero-based midrank of positions start..end
        let mid = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = 100.0 * mid / (n - 1) as f64;
        }
        start = end;
    }
    Ok(out)
}

/// One professor's raw indicator value, `None` when undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortEntry {
    pub professor_id: String,
    pub key: CohortKey,
    pub value: Option<f64>,
}

/// Percentiles for every defined entry, grouped by cohort. Output is sorted
/// by professor id; undefined values get no percentile.
pub fn cohort_percentiles(
    indicator: Indicator,
    entries: &[CohortEntry],
) -> Result<Vec<PercentileScore>> {
    let mut cohorts: BTreeMap<&CohortKey, Vec<(&str, f64)>> = BTreeMap::new();
    for e in entries {
        if let Some(v) = e.value {
            cohorts
                .entry(&e.key)
                .or_default()
                .push((e.professor_id.as_str(), v));
        }
    }
    let mut out = Vec::new();
    for members in cohorts.values() {
        let values: Vec<f64> = members.iter().map(|(_, v)| *v).collect();
        let pct = percentile_rank(&values)?;
        for ((id, _), p) in members.iter().zip(pct) {
            out.push(PercentileScore {
                professor_id: String::from(*id),
                indicator,
                percentile: p,
            });
        }
    }
    out.sort_by(|a, b| a.professor_id.cmp(&b.professor_id));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distinct_triple() {
        assert_eq!(
            percentile_rank(&[10.0, 20.0, 30.0]).unwrap(),
            vec![0.0, 50.0, 100.0]
        );
        assert_eq!(
            percentile_rank(&[30.0, 10.0, 20.0]).unwrap(),
            vec![100.0, 0.0, 50.0]
        );
    }

    #[test]
    fn all_tied_score_fifty() {
        assert_eq!(percentile_rank(&[3.0; 5]).unwrap(), vec![50.0; 5]);
    }

    #[test]
    fn singleton_and_empty() {
        assert_eq!(percentile_rank(&[7.0]).unwrap(), vec![50.0]);
        assert_eq!(percentile_rank(&[]), Err(Error::EmptyCohort));
        assert!(percentile_rank(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn ties_share_midrank() {
        // ranks 1, 2.5, 2.5, 4 over n = 4
        let p = percentile_rank(&[1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(p, vec![0.0, 50.0, 50.0, 100.0]);
    }

    #[test]
    fn cohorts_are_separate_and_undefined_skipped() {
        let e = |id: &str, sds: &str, v: Option<f64>| CohortEntry {
            professor_id: id.into(),
            key: CohortKey::full_professors(sds),
            value: v,
        };
        let entries = [
            e("a", "X", Some(1.0)),
            e("b", "X", Some(2.0)),
            e("c", "Y", Some(100.0)),
            e("d", "Y", None),
        ];
        let out = cohort_percentiles(Indicator::Ia, &entries).unwrap();
        let ids: Vec<_> = out
            .iter()
            .map(|s| (s.professor_id.as_str(), s.percentile))
            .collect();
        assert_eq!(ids, vec![("a", 0.0), ("b", 100.0), ("c", 50.0)]);
    }

    proptest! {
        #[test]
        fn mean_is_fifty(values in proptest::collection::vec(0u8..20, 1..60)) {
            let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
            let p = percentile_rank(&v).unwrap();
            let mean = p.iter().sum::<f64>() / p.len() as f64;
            prop_assert!((mean - 50.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|&x| (0.0..=100.0).contains(&x)));
        }

        #[test]
        fn reversal_antisymmetry(values in proptest::collection::vec(-50i32..50, 2..60)) {
            let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let p = percentile_rank(&v).unwrap();
            let q = percentile_rank(&neg).unwrap();
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a + b - 100.0).abs() < 1e-9);
            }
        }
    }
}
