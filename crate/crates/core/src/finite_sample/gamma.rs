use super::{check_n, Diagnostics, ExpectationResult};
use crate::error::{Error, Result};
use crate::specnum::{gamma_q, integrate_semi_infinite, Quadrature, QuadratureConfig};

/// `∫_0^∞ Q(alpha, w/(n-1)) Q((n-1) alpha, w) dw`, which equals
/// `E[min{(n-1) U, V}]` for independent `U ~ Gamma(alpha, 1)`,
/// `V ~ Gamma((n-1) alpha, 1)`.
pub fn min_term_integral(alpha: f64, n: usize, cfg: &QuadratureConfig) -> Result<Quadrature> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    check_n(n)?;
    let m = (n - 1) as f64;
    let rest_shape = m * alpha;

    let integrand = |w: f64| gamma_q(alpha, w / m) * gamma_q(rest_shape, w);
    // Each factor is at most 1, so the tail is bounded by the smaller of the
    // two single-factor tails, using ∫_W^∞ Q(a, u) du = a Q(a+1, W) - W Q(a, W).
    let tail = |big_w: f64| {
        let tail_rest = rest_shape * gamma_q(rest_shape + 1.0, big_w) - big_w * gamma_q(rest_shape, big_w);
        let u = big_w / m;
        let tail_first = m * (alpha * gamma_q(alpha + 1.0, u) - u * gamma_q(alpha, u));
        tail_rest.min(tail_first).max(0.0)
    };
    integrate_semi_infinite(integrand, tail, cfg)
}

/// `E[H_hat]` for a gamma population with shape `alpha`:
/// `(1 - 1/n) - ∫_0^∞ Q(alpha, w/(n-1)) Q((n-1) alpha, w) dw / (n alpha)`.
/// Independent of the rate.
pub fn expected_hoover_gamma(alpha: f64, n: usize, cfg: &QuadratureConfig) -> Result<ExpectationResult> {
    let q = min_term_integral(alpha, n, cfg)?;
    let nf = n as f64;
    Ok(ExpectationResult {
        value: (1.0 - 1.0 / nf) - q.value / (nf * alpha),
        err_est: q.err_est / (nf * alpha),
        method: "gamma_tilted_integral",
        diagnostics: Diagnostics {
            subintervals: q.subintervals,
            evaluations: q.evaluations,
            cutoff: q.cutoff,
            ..Default::default()
        },
    })
}
