//! Maximum likelihood fits for the supported families.

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimators::{pairwise_sum, Sample};
use crate::specnum::{ln_gamma, log_minus_digamma, trigamma};

/// Relative step size at which the gamma shape iteration stops.
pub const GAMMA_FIT_TOL: f64 = 1e-10;
pub const GAMMA_FIT_MAX_ITER: usize = 100;

/// Fitted population with its log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub spec: DistributionSpec,
    pub loglik: f64,
    /// Solver iterations (0 for closed-form estimators).
    pub iterations: usize,
}

fn log_sum(sample: &Sample) -> f64 {
    let logs: Vec<f64> = sample.sorted().iter().map(|v| v.ln()).collect();
    pairwise_sum(&logs)
}

fn ln_factorial_sum(sample: &Sample) -> f64 {
    let terms: Vec<f64> = sample.sorted().iter().map(|&v| ln_gamma(v + 1.0)).collect();
    pairwise_sum(&terms)
}

/// Gamma ML: the shape solves `ln alpha - psi(alpha) = ln mean(X) - mean(ln X)`,
/// then `rate = alpha / mean(X)`.
///
/// Newton steps on the shape, falling back to bisection whenever a step
/// leaves the current bracket.
pub fn fit_gamma_ml(sample: &Sample, tol: f64, max_iter: usize) -> Result<FitResult> {
    if let Some(i) = sample.values().iter().position(|&v| v == 0.0) {
        return Err(Error::domain(format!(
            "gamma fit needs strictly positive data, value at position {i} is 0"
        )));
    }
    let n = sample.len() as f64;
    let mean = sample.mean();
    let sum_log = log_sum(sample);
    let s = mean.ln() - sum_log / n;
    if s.is_nan() || s <= 0.0 {
        return Err(Error::Degenerate(
            "sample is constant, gamma shape estimate is infinite".into(),
        ));
    }

    let f = |a: f64| log_minus_digamma(a) - s;
    // Close to the root for both small and large shapes.
    let mut alpha = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let fa = f(alpha);
        if fa == 0.0 {
            converged = true;
            break;
        }
        // f is decreasing
        if fa > 0.0 {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let slope = 1.0 / alpha - trigamma(alpha).unwrap_or(f64::NAN);
        let mut next = alpha - fa / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * alpha };
        }
        let step = (next - alpha).abs();
        alpha = next;
        if step <= tol * alpha {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "gamma shape fit",
            best: alpha,
            err_est: f(alpha).abs(),
        });
    }

    let rate = alpha / mean;
    let loglik = n * (alpha * rate.ln() - ln_gamma(alpha)) + (alpha - 1.0) * sum_log - rate * n * mean;
    Ok(FitResult {
        spec: DistributionSpec::gamma(alpha, rate)?,
        loglik,
        iterations,
    })
}

/// Poisson ML: `lambda = mean(X)`.
pub fn fit_poisson_ml(sample: &Sample) -> Result<FitResult> {
    sample.check_integer()?;
    let n = sample.len() as f64;
    let lambda = sample.mean();
    if lambda == 0.0 {
        return Err(Error::Degenerate("all observations are 0, lambda estimate is 0".into()));
    }
    let loglik = n * mean_log_term(lambda) - ln_factorial_sum(sample);
    Ok(FitResult {
        spec: DistributionSpec::poisson(lambda)?,
        loglik,
        iterations: 0,
    })
}

fn mean_log_term(lambda: f64) -> f64 {
    lambda * lambda.ln() - lambda
}

/// Geometric ML on `{0, 1, ...}`: `p = 1 / (1 + mean(X))`.
pub fn fit_geometric_ml(sample: &Sample) -> Result<FitResult> {
    sample.check_integer()?;
    let n = sample.len() as f64;
    let mean = sample.mean();
    if mean == 0.0 {
        return Err(Error::Degenerate("all observations are 0, p estimate is 1".into()));
    }
    let p = 1.0 / (1.0 + mean);
    let loglik = n * (p.ln() + mean * (-p).ln_1p());
    Ok(FitResult {
        spec: DistributionSpec::geometric(p)?,
        loglik,
        iterations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample, Seed};
    use crate::error::SampleError;

    fn smp(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    fn gamma_params(fit: &FitResult) -> (f64, f64) {
        match fit.spec {
            DistributionSpec::Gamma(g) => (g.shape(), g.rate()),
            _ => panic!("not gamma"),
        }
    }

    fn gamma_loglik(x: &[f64], a: f64, r: f64) -> f64 {
        x.iter()
            .map(|&v| a * r.ln() - ln_gamma(a) + (a - 1.0) * v.ln() - r * v)
            .sum()
    }

    #[test]
    fn gamma_fit_maximizes_likelihood() {
        let x = [0.3, 1.7, 2.2, 0.9, 4.1, 0.05, 1.1];
        let fit = fit_gamma_ml(&smp(&x), GAMMA_FIT_TOL, GAMMA_FIT_MAX_ITER).unwrap();
        let (a, r) = gamma_params(&fit);
        assert!((fit.loglik - gamma_loglik(&x, a, r)).abs() < 1e-10);
        // coarse grid search over the profile likelihood
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 1..20000 {
            let cand = i as f64 * 5e-4;
            let ll = gamma_loglik(&x, cand, cand / mean);
            if ll > best.0 {
                best = (ll, cand);
            }
        }
        assert!((a - best.1).abs() < 1e-3, "{a} vs {}", best.1);
        assert!(fit.loglik >= best.0 - 1e-9);
        assert!((r - a / mean).abs() < 1e-12);
    }

    #[test]
    fn gamma_fit_is_consistent() {
        for (alpha, rate) in [(0.5, 1.0), (2.0, 3.0), (20.0, 0.1)] {
            let spec = DistributionSpec::gamma(alpha, rate).unwrap();
            let x = sample(&spec, 100_000, Seed(5), 0);
            let fit = fit_gamma_ml(&smp(&x), GAMMA_FIT_TOL, GAMMA_FIT_MAX_ITER).unwrap();
            let (a, r) = gamma_params(&fit);
            assert!((a / alpha - 1.0).abs() < 0.03, "alpha {alpha}: {a}");
            assert!((r / rate - 1.0).abs() < 0.03, "rate {rate}: {r}");
        }
    }

    #[test]
    fn gamma_fit_extreme_shapes() {
        let nearly_constant = smp(&[1.0, 1.0 + 1e-6, 1.0 - 1e-6, 1.0]);
        let (a, _) = gamma_params(&fit_gamma_ml(&nearly_constant, GAMMA_FIT_TOL, GAMMA_FIT_MAX_ITER).unwrap());
        assert!(a > 1e11);
        let spread = smp(&[1e-12, 1e-6, 1.0, 1e3]);
        let (a, _) = gamma_params(&fit_gamma_ml(&spread, GAMMA_FIT_TOL, GAMMA_FIT_MAX_ITER).unwrap());
        assert!(a > 0.0 && a < 0.2);
    }

    #[test]
    fn gamma_fit_failures() {
        assert!(matches!(
            fit_gamma_ml(&smp(&[2.0, 2.0, 2.0]), GAMMA_FIT_TOL, GAMMA_FIT_MAX_ITER),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            fit_gamma_ml(&smp(&[0.0, 1.0]), GAMMA_FIT_TOL, GAMMA_FIT_MAX_ITER),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_gamma_ml(&smp(&[0.3, 1.7, 2.2]), GAMMA_FIT_TOL, 1),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn poisson_fit() {
        let fit = fit_poisson_ml(&smp(&[0.0, 2.0, 3.0, 1.0])).unwrap();
        assert_eq!(fit.spec, DistributionSpec::poisson(1.5).unwrap());
        let want: f64 = [0.0f64, 2.0, 3.0, 1.0]
            .iter()
            .map(|&k| k * 1.5f64.ln() - 1.5 - ln_gamma(k + 1.0))
            .sum();
        assert!((fit.loglik - want).abs() < 1e-12);
        assert!(matches!(fit_poisson_ml(&smp(&[0.0, 0.0])), Err(Error::Degenerate(_))));
        assert!(matches!(
            fit_poisson_ml(&smp(&[1.0, 2.5])),
            Err(Error::Sample(SampleError::NotInteger { index: 1, .. }))
        ));
    }

    #[test]
    fn geometric_fit() {
        let fit = fit_geometric_ml(&smp(&[0.0, 1.0, 5.0])).unwrap();
        assert_eq!(fit.spec, DistributionSpec::geometric(1.0 / 3.0).unwrap());
        let want = 3.0 * (1.0f64 / 3.0).ln() + 6.0 * (2.0f64 / 3.0).ln();
        assert!((fit.loglik - want).abs() < 1e-12);
        assert!(matches!(fit_geometric_ml(&smp(&[0.0, 0.0])), Err(Error::Degenerate(_))));
        assert!(fit_geometric_ml(&smp(&[0.5, 1.0])).is_err());
    }
}
