//! Exact-dependence and variance-inflation screening of design columns.

use alloc::vec::Vec;

use crate::linalg::{dot, inverse_spd, norm, Matrix};

/// Columns whose VIF exceeds this are pruned.
pub const VIF_THRESHOLD: f64 = 10.0;

/// Relative residual norm below which a column counts as an exact linear
/// combination of earlier ones.
pub const EXACT_DEPENDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CollinearityReport {
    /// Retained column indices, in input order.
    pub kept: Vec<usize>,
    /// Pruned column indices, in the order they were dropped.
    pub dropped: Vec<usize>,
    /// VIF of each retained non-constant column.
    pub vifs: Vec<(usize, f64)>,
}

fn is_constant(col: &[f64]) -> bool {
    col.windows(2).all(|w| w[0] == w[1])
}

/// Indices of columns that are linear combinations of earlier columns.
fn exactly_dependent(x: &Matrix) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..x.cols() {
        let original = x.column(j);
        let scale = norm(&original);
        if scale == 0.0 {
            dependent.push(j);
            continue;
        }
        let mut v = original;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let r = norm(&v);
        if r <= EXACT_DEPENDENCE_TOL * scale {
            dependent.push(j);
        } else {
            v.iter_mut().for_each(|x| *x /= r);
            basis.push(v);
        }
    }
    dependent
}

/// Variance inflation factors of the non-constant columns in `cols`:
/// `VIF_j = 1 / (1 - R²_j)` from regressing centered column `j` on the other
/// centered columns, read off the inverse covariance matrix.
pub fn variance_inflation(x: &Matrix, cols: &[usize]) -> Vec<(usize, f64)> {
    let varying: Vec<usize> = cols
        .iter()
        .copied()
        .filter(|&j| !is_constant(&x.column(j)))
        .collect();
    let n = x.rows();
    let k = varying.len();
    if k == 0 {
        return Vec::new();
    }
    let centered: Vec<Vec<f64>> = varying
        .iter()
        .map(|&j| {
            let c = x.column(j);
            let m = c.iter().sum::<f64>() / n as f64;
            c.into_iter().map(|v| v - m).collect()
        })
        .collect();
    let mut cov = Matrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let s = dot(&centered[a], &centered[b]);
            cov[(a, b)] = s;
            cov[(b, a)] = s;
        }
    }
    match inverse_spd(&cov) {
        Ok(inv) => varying
            .iter()
            .enumerate()
            .map(|(a, &j)| (j, (inv[(a, a)] * cov[(a, a)]).max(1.0)))
            .collect(),
        Err(_) => varying.iter().map(|&j| (j, f64::INFINITY)).collect(),
    }
}

/// Drops exactly dependent columns, then repeatedly drops the last-listed
/// non-exempt column whose VIF exceeds [`VIF_THRESHOLD`]. Returns the report
/// and the pruned matrix.
pub fn collinearity_check(x: &Matrix, vif_exempt: &[bool]) -> (CollinearityReport, Matrix) {
    debug_assert_eq!(vif_exempt.len(), x.cols());
    let mut dropped = exactly_dependent(x);
    let mut kept: Vec<usize> = (0..x.cols()).filter(|j| !dropped.contains(j)).collect();
    let vifs = loop {
        let vifs = variance_inflation(x, &kept);
        let offender = vifs
            .iter()
            .filter(|(j, v)| !vif_exempt[*j] && *v > VIF_THRESHOLD)
            .map(|(j, _)| *j)
            .max();
        match offender {
            Some(j) => {
                kept.retain(|&c| c != j);
                dropped.push(j);
            }
            None => break vifs,
        }
    };
    let pruned = x.select_columns(&kept);
    (
        CollinearityReport {
            kept,
            dropped,
            vifs,
        },
        pruned,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn with_intercept(cols: &[Vec<f64>]) -> Matrix {
        let n = cols[0].len();
        let mut all = vec![vec![1.0; n]];
        all.extend_from_slice(cols);
        Matrix::from_columns(&all).unwrap()
    }

    #[test]
    fn scaled_duplicate_is_dropped() {
        let a = vec![1.0, 2.0, 4.0, 3.0, 7.0, 5.0];
        let b = vec![0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        let twice: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let x = with_intercept(&[a, b, twice]);
        let (report, pruned) = collinearity_check(&x, &[true, false, false, false]);
        assert_eq!(report.dropped, vec![3]);
        assert_eq!(pruned.cols(), 3);
    }

    #[test]
    fn orthogonal_columns_have_unit_vif() {
        let a = vec![1.0, -1.0, 1.0, -1.0];
        let b = vec![1.0, 1.0, -1.0, -1.0];
        let x = with_intercept(&[a, b]);
        let (report, _) = collinearity_check(&x, &[true, false, false]);
        assert!(report.dropped.is_empty());
        for (_, v) in &report.vifs {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_and_zero_columns_are_dependent() {
        let a = vec![1.0, 2.0, 3.0, 4.0, 6.0];
        let zeros = vec![0.0; 5];
        let x = with_intercept(&[a, zeros]);
        let (report, _) = collinearity_check(&x, &[true, false, false]);
        assert_eq!(report.dropped, vec![2]);
    }

    #[test]
    fn exempt_columns_survive_high_vif() {
        let a: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let b: Vec<f64> = a
            .iter()
            .map(|v| v + if (*v as i32) % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let x = with_intercept(&[a, b]);
        let (report, _) = collinearity_check(&x, &[true, true, true]);
        assert!(report.dropped.is_empty());
        let (report, _) = collinearity_check(&x, &[true, false, false]);
        assert_eq!(report.dropped, vec![2]);
    }
}
