//! Bernoulli quasi-maximum likelihood for a logistic mean with fractional
//! responses, solved by damped Newton steps (IRLS for the canonical link).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{inverse_spd, solve_spd, sup_norm, Matrix};
use crate::math::{ln, ln_logistic, logistic, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop when the score's sup-norm drops below this.
    pub gradient_tolerance: f64,
    /// Relative quasi-log-likelihood change treated as no progress.
    pub relative_tolerance: f64,
    /// Consecutive no-progress iterations accepted as convergence at the
    /// floating-point floor.
    pub stall_limit: usize,
    /// `|xβ|` beyond which coefficients are considered diverging.
    pub separation_eta: f64,
    /// Largest change in `xβ` a converged Newton step may propose.
    pub step_tolerance: f64,
    pub max_step_halvings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gradient_tolerance: 1e-8,
            relative_tolerance: 1e-12,
            stall_limit: 3,
            separation_eta: 30.0,
            step_tolerance: 1e-6,
            max_step_halvings: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QmleFit {
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub log_likelihood: f64,
    pub gradient_sup_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sandwich covariance `A⁻¹ B A⁻¹`.
    pub robust_cov: Matrix,
    /// Inverse expected Hessian `A⁻¹`.
    pub classical_cov: Matrix,
}

impl QmleFit {
    pub fn n_parameters(&self) -> usize {
        self.coefficients.len()
    }

    pub fn aic(&self) -> f64 {
        2.0 * self.n_parameters() as f64 - 2.0 * self.log_likelihood
    }

    pub fn robust_se(&self) -> Vec<f64> {
        self.robust_cov
            .diagonal()
            .into_iter()
            .map(|d| sqrt(d.max(0.0)))
            .collect()
    }

    pub fn classical_se(&self) -> Vec<f64> {
        self.classical_cov
            .diagonal()
            .into_iter()
            .map(|d| sqrt(d.max(0.0)))
            .collect()
    }
}

/// `Σ y ln G(η) + (1 - y) ln(1 - G(η))`.
pub fn quasi_log_likelihood(y: &[f64], eta: &[f64]) -> f64 {
    y.iter()
        .zip(eta)
        .map(|(&yi, &e)| yi * ln_logistic(e) + (1.0 - yi) * ln_logistic(-e))
        .sum()
}

/// Score vector `Xᵀ (y - G(Xβ))`.
pub fn score(y: &[f64], x: &Matrix, beta: &[f64]) -> Vec<f64> {
    let eta = x.mul_vec(beta);
    let resid: Vec<f64> = y
        .iter()
        .zip(&eta)
        .map(|(yi, e)| yi - logistic(*e))
        .collect();
    x.t_mul_vec(&resid)
}

fn check_inputs(y: &[f64], x: &Matrix) -> Result<()> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {} design rows",
            y.len(),
            x.rows()
        )));
    }
    if x.cols() == 0 || y.len() <= x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "need more observations ({}) than terms ({})",
            y.len(),
            x.cols()
        )));
    }
    for &v in y {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::ResponseOutOfRange(v));
        }
    }
    for i in 0..x.rows() {
        if x.row(i).iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix"));
        }
    }
    Ok(())
}

pub fn fit_fractional_logit(y: &[f64], x: &Matrix, options: &SolverOptions) -> Result<QmleFit> {
    check_inputs(y, x)?;
    let p = x.cols();
    let mut beta = vec![0.0; p];
    let mut eta = vec![0.0; y.len()];
    let mut ll = quasi_log_likelihood(y, &eta);
    let mut stalled = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < options.max_iterations {
        let mu: Vec<f64> = eta.iter().map(|e| logistic(*e)).collect();
        let resid: Vec<f64> = y.iter().zip(&mu).map(|(yi, m)| yi - m).collect();
        let grad = x.t_mul_vec(&resid);
        if stalled >= options.stall_limit {
            converged = true;
            break;
        }
        let w: Vec<f64> = mu.iter().map(|m| m * (1.0 - m)).collect();
        let hessian = x.weighted_gram(&w);
        let small_gradient = sup_norm(&grad) < options.gradient_tolerance;
        let direction = match solve_spd(&hessian, &grad) {
            Ok(d) => d,
            Err(_) if small_gradient => {
                converged = true;
                break;
            }
            Err(e) => return Err(e),
        };
        // A tiny gradient with a large Newton step means the fit is drifting
        // toward 0 or 1, not settled.
        if small_gradient && sup_norm(&x.mul_vec(&direction)) < options.step_tolerance {
            converged = true;
            break;
        }

        iterations += 1;
        let floor = ll - 4.0 * f64::EPSILON * ll.abs();
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=options.max_step_halvings {
            let trial: Vec<f64> = beta
                .iter()
                .zip(&direction)
                .map(|(b, d)| b + step * d)
                .collect();
            let trial_eta = x.mul_vec(&trial);
            let trial_ll = quasi_log_likelihood(y, &trial_eta);
            if trial_ll.is_finite() && trial_ll >= floor {
                accepted = Some((trial, trial_eta, trial_ll));
                break;
            }
            step *= 0.5;
        }
        let Some((new_beta, new_eta, new_ll)) = accepted else {
            // no ascent possible: at the floating-point floor
            stalled = options.stall_limit;
            continue;
        };
        let change = (new_ll - ll).abs() / ll.abs().max(f64::MIN_POSITIVE);
        if change < options.relative_tolerance {
            stalled += 1;
        } else {
            stalled = 0;
        }
        beta = new_beta;
        eta = new_eta;
        ll = new_ll;
        let max_eta = sup_norm(&eta);
        if max_eta > options.separation_eta {
            return Err(Error::QuasiSeparation { max_eta });
        }
    }

    let mu: Vec<f64> = eta.iter().map(|e| logistic(*e)).collect();
    let resid: Vec<f64> = y.iter().zip(&mu).map(|(yi, m)| yi - m).collect();
    let grad = x.t_mul_vec(&resid);
    let gradient_sup_norm = sup_norm(&grad);
    if !converged {
        return Err(Error::NotConverged {
            iterations,
            gradient: gradient_sup_norm,
        });
    }

    let w: Vec<f64> = mu.iter().map(|m| m * (1.0 - m)).collect();
    let bread = inverse_spd(&x.weighted_gram(&w))?;
    let squared: Vec<f64> = resid.iter().map(|r| r * r).collect();
    let meat = x.weighted_gram(&squared);
    let robust_cov = bread.matmul(&meat)?.matmul(&bread)?;

    Ok(QmleFit {
        coefficients: beta,
        fitted: mu,
        log_likelihood: ll,
        gradient_sup_norm,
        iterations,
        converged,
        robust_cov,
        classical_cov: bread,
    })
}

/// Quasi-log-likelihood of the intercept-only fit, whose fitted mean is the
/// sample mean of `y`.
pub fn null_log_likelihood(y: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::EmptyInput("response"));
    }
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    if ybar <= 0.0 || ybar >= 1.0 {
        return Err(Error::DegenerateNullLikelihood);
    }
    let (a, b) = (ln(ybar), ln(1.0 - ybar));
    Ok(y.iter().map(|yi| yi * a + (1.0 - yi) * b).sum())
}

/// McFadden's `1 - ℓ_model / ℓ_null`. Differences below the solver's
/// likelihood resolution count as zero.
pub fn mcfadden_pseudo_r2(model_log_likelihood: f64, y: &[f64]) -> Result<f64> {
    let null = null_log_likelihood(y)?;
    if null == 0.0 {
        return Err(Error::DegenerateNullLikelihood);
    }
    let gain = model_log_likelihood - null;
    if gain <= SolverOptions::default().relative_tolerance * null.abs() {
        return Ok(0.0);
    }
    Ok(1.0 - model_log_likelihood / null)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn grid_design(n: usize) -> (Vec<f64>, Matrix) {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * 400.0 / (n - 1) as f64).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|x| vec![1.0, *x]).collect();
        (xs, Matrix::from_rows(&rows).unwrap())
    }

    #[test]
    fn recovers_noiseless_line() {
        let (xs, x) = grid_design(500);
        let y: Vec<f64> = xs.iter().map(|v| logistic(0.3 - 0.02 * v)).collect();
        let fit = fit_fractional_logit(&y, &x, &SolverOptions::default()).unwrap();
        assert!((fit.coefficients[0] - 0.3).abs() < 1e-6);
        assert!((fit.coefficients[1] + 0.02).abs() < 1e-6);
        assert!(fit.gradient_sup_norm < 1e-8);

        // coarse grid search of the quasi-likelihood lands in the same cell
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=40 {
            for j in 0..=40 {
                let a = -1.0 + i as f64 * 0.05;
                let b = -0.04 + j as f64 * 0.002;
                let eta: Vec<f64> = xs.iter().map(|v| a + b * v).collect();
                let ll = quasi_log_likelihood(&y, &eta);
                if ll > best.0 {
                    best = (ll, a, b);
                }
            }
        }
        assert!((best.1 - 0.3).abs() < 0.05 + 1e-9);
        assert!((best.2 + 0.02).abs() < 0.002 + 1e-9);
        assert!(best.0 <= fit.log_likelihood);
    }

    #[test]
    fn constant_half_gives_zero_intercept() {
        let y = vec![0.5; 20];
        let x = Matrix::from_rows(&vec![vec![1.0]; 20]).unwrap();
        let fit = fit_fractional_logit(&y, &x, &SolverOptions::default()).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-12);
    }

    #[test]
    fn separating_dummy_is_reported() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![1.0, (i % 2) as f64]).collect();
        let y: Vec<f64> = (0..40).map(|i| (i % 2) as f64).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        assert!(matches!(
            fit_fractional_logit(&y, &x, &SolverOptions::default()),
            Err(Error::QuasiSeparation { .. })
        ));
    }

    #[test]
    fn rejects_out_of_range_response() {
        let x = Matrix::from_rows(&vec![vec![1.0]; 3]).unwrap();
        assert!(matches!(
            fit_fractional_logit(&[0.2, 1.2, 0.5], &x, &SolverOptions::default()),
            Err(Error::ResponseOutOfRange(_))
        ));
    }

    #[test]
    fn endpoints_are_legal() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64]).collect();
        let y = vec![0.0, 0.1, 0.0, 0.4, 1.0, 0.3, 0.9, 1.0, 0.6, 1.0];
        let x = Matrix::from_rows(&rows).unwrap();
        let fit = fit_fractional_logit(&y, &x, &SolverOptions::default()).unwrap();
        assert!(fit.log_likelihood.is_finite());
        assert!(fit.gradient_sup_norm < 1e-8);
    }

    #[test]
    fn null_model_pseudo_r2_is_zero() {
        let y: Vec<f64> = (0..25).map(|i| (i % 5) as f64 / 4.0).collect();
        let x = Matrix::from_rows(&vec![vec![1.0]; 25]).unwrap();
        let fit = fit_fractional_logit(&y, &x, &SolverOptions::default()).unwrap();
        let null = null_log_likelihood(&y).unwrap();
        assert!((fit.log_likelihood - null).abs() < 1e-12 * null.abs());
        assert_eq!(mcfadden_pseudo_r2(fit.log_likelihood, &y).unwrap(), 0.0);
        assert_eq!(
            mcfadden_pseudo_r2(-1.0, &[0.0, 0.0]),
            Err(Error::DegenerateNullLikelihood)
        );
    }

    #[test]
    fn pseudo_r2_by_hand_on_ten_rows() {
        let xs = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.3, 0.8, 1.2, 1.7, 2.5];
        let y = [0.05, 0.1, 0.2, 0.3, 0.5, 0.55, 0.7, 0.8, 0.9, 0.97];
        let rows: Vec<Vec<f64>> = xs.iter().map(|v| vec![1.0, *v]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let fit = fit_fractional_logit(&y, &x, &SolverOptions::default()).unwrap();
        let model: f64 = y
            .iter()
            .zip(&fit.fitted)
            .map(|(yi, m)| yi * m.ln() + (1.0 - yi) * (1.0 - m).ln())
            .sum();
        let ybar = y.iter().sum::<f64>() / 10.0;
        let null: f64 = y
            .iter()
            .map(|yi| yi * ybar.ln() + (1.0 - yi) * (1.0 - ybar).ln())
            .sum();
        let expected = 1.0 - model / null;
        let r2 = mcfadden_pseudo_r2(fit.log_likelihood, &y).unwrap();
        assert!((r2 - expected).abs() < 1e-12);
        assert!(r2 > 0.0 && r2 < 1.0);
    }
}
