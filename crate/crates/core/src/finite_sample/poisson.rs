use super::{check_n, integrate_windowed, Diagnostics, ExpectationResult, NodeLog};
use crate::error::{Error, Result};
use crate::specnum::{gamma_p, sum_series_from, QuadratureConfig, SeriesConfig};

use super::WINDOW;

/// `E[H_hat] <= (1 - 1/n)(1 - e^{-n lambda})` for Poisson samples.
pub fn poisson_upper_bound(lambda: f64, n: usize) -> f64 {
    let nf = n as f64;
    (1.0 - 1.0 / nf) * -(-nf * lambda).exp_m1()
}

/// `S(w) = sum_k P(floor(k/(n-1)) + 1, w) P(k + 1, (n-1) w)`.
fn lattice_sum(w: f64, m: usize, cfg: &SeriesConfig, log: &NodeLog) -> f64 {
    let mw = m as f64 * w;
    let min_terms = (mw + 10.0 * mw.sqrt() + 20.0).ceil() as usize;
    let term = |k: usize| gamma_p((k / m) as f64 + 1.0, w) * gamma_p(k as f64 + 1.0, mw);
    log.record(sum_series_from(term, min_terms, cfg))
}

/// `E[H_hat]` for a Poisson(`lambda`) population:
/// `∫_0^lambda e^{n(w - lambda)} [(n-1) - S(w)/w] dw`.
pub fn expected_hoover_poisson(
    lambda: f64,
    n: usize,
    qcfg: &QuadratureConfig,
    scfg: &SeriesConfig,
) -> Result<ExpectationResult> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    check_n(n)?;
    let m = n - 1;
    let nf = n as f64;
    let log = NodeLog::default();

    let integrand = |w: f64| {
        let weight = (nf * (w - lambda)).exp();
        if w <= 0.0 {
            // S(w)/w -> 0 as w -> 0
            return weight * m as f64;
        }
        let s = lattice_sum(w, m, scfg, &log);
        weight * (m as f64 - s / w)
    };
    // e^{n(w - lambda)} confines the mass to a window of width O(1/n) below lambda.
    let split = lambda - WINDOW / nf;
    let res = integrate_windowed(integrand, 0.0, split, lambda, qcfg);
    let (q, max_terms, max_tail) = log.finish(res)?;

    Ok(ExpectationResult {
        value: q.value,
        err_est: q.err_est,
        method: "poisson_tilted_lattice",
        diagnostics: Diagnostics {
            subintervals: q.subintervals,
            evaluations: q.evaluations,
            cutoff: None,
            max_series_terms: max_terms,
            max_series_tail: max_tail,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hoover_core::hoover_poisson;

    fn run(lambda: f64, n: usize) -> ExpectationResult {
        expected_hoover_poisson(lambda, n, &QuadratureConfig::default(), &SeriesConfig::default()).unwrap()
    }

    /// Exact `E[H_hat]` by enumerating every sample in `{0..kmax}^n`.
    fn enumerate(lambda: f64, n: usize, kmax: usize) -> f64 {
        let pmf: Vec<f64> = (0..=kmax)
            .map(|k| {
                let lf: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
                (k as f64 * lambda.ln() - lambda - lf).exp()
            })
            .collect();
        let mut idx = vec![0usize; n];
        let mut total = 0.0;
        loop {
            let s: usize = idx.iter().sum();
            if s > 0 {
                let mean = s as f64 / n as f64;
                let dev: f64 = idx.iter().map(|&x| (x as f64 - mean).abs()).sum();
                let p: f64 = idx.iter().map(|&x| pmf[x]).product();
                total += p * dev / (2.0 * s as f64);
            }
            let mut i = 0;
            loop {
                if i == n {
                    return total;
                }
                idx[i] += 1;
                if idx[i] <= kmax {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn matches_enumeration() {
        for (lambda, n, kmax) in [(1.0, 2, 40), (2.5, 3, 35), (0.3, 4, 20)] {
            let want = enumerate(lambda, n, kmax);
            let got = run(lambda, n);
            assert!(
                (got.value - want).abs() < 1e-9,
                "lambda={lambda} n={n}: {} vs {want}",
                got.value
            );
        }
    }

    #[test]
    fn frozen_values() {
        assert!((run(1.0, 2).value - 0.274_364_354_085_165_5).abs() < 1e-9);
        assert!((run(2.5, 3).value - 0.220_865_642_739_837).abs() < 1e-9);
        assert!((run(1.0, 5).value - 0.399_394_942_221_820_87).abs() < 1e-9);
        assert!((run(1.0, 25).value - 0.390_897_035_791_782_2).abs() < 1e-9);
        assert!((run(2.5, 5).value - 0.234_822_481_414_268_42).abs() < 1e-9);
        assert!((run(2.5, 25).value - 0.249_699_701_178_780_51).abs() < 1e-9);
    }

    #[test]
    fn within_bounds_and_converging() {
        for lambda in [0.05, 1.0, 4.0, 12.0] {
            let h = hoover_poisson(lambda);
            for n in [2, 10, 60] {
                let e = run(lambda, n);
                assert!(e.value >= 0.0 && e.value <= poisson_upper_bound(lambda, n) + 1e-12);
                assert!(e.diagnostics.max_series_terms > 0);
            }
            assert!((run(lambda, 200).value - h).abs() < 0.02, "lambda={lambda}");
        }
    }

    #[test]
    fn concentrated_weight_at_large_n_lambda() {
        let e = run(20.0, 1000).value;
        let h = hoover_poisson(20.0);
        assert!(e > 0.0 && (e - h).abs() < 1e-3, "{e} vs {h}");
    }

    #[test]
    fn upper_bound_values() {
        assert!((poisson_upper_bound(1.0, 2) - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!(poisson_upper_bound(1e-9, 3) > 0.0);
    }
}
