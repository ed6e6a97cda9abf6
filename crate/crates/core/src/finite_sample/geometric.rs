use super::{check_n, integrate_windowed, Diagnostics, ExpectationResult, NodeLog, WINDOW};
use crate::error::{Error, Result};
use crate::specnum::{inc_beta, sum_series_from, QuadratureConfig, SeriesConfig};

const POWER_FLOOR: f64 = 1e-16;

/// `E[H_hat] <= (1 - 1/n)(1 - p^n)` for geometric samples on `{0, 1, ...}`.
pub fn geometric_upper_bound(p: f64, n: usize) -> f64 {
    let nf = n as f64;
    (1.0 - 1.0 / nf) * -(nf * p.ln()).exp_m1()
}

/// Terms needed before the stopping rule may fire: the smaller of the point
/// where `w^{floor(k/(n-1))}` drops below `POWER_FLOOR` and ten standard
/// deviations past the mean of the negative binomial behind `I_w(k+1, n-1)`.
fn min_terms(w: f64, m: usize) -> usize {
    let mf = m as f64;
    let by_power = if w <= 0.0 {
        m
    } else {
        let q = (POWER_FLOOR.ln() / w.ln()).ceil().max(1.0);
        (mf * q).min(1e15) as usize
    };
    let mean = mf * w / (1.0 - w);
    let sd = (mf * w).sqrt() / (1.0 - w);
    let by_tail = (mean + 10.0 * sd + 20.0).ceil().min(1e15) as usize;
    by_power.min(by_tail)
}

/// `T(w) = sum_k w^{floor(k/(n-1))} I_w(k+1, n-1)`.
fn lattice_sum(w: f64, m: usize, cfg: &SeriesConfig, log: &NodeLog) -> f64 {
    let mf = m as f64;
    let term = |k: usize| w.powi((k / m) as i32) * inc_beta(w, k as f64 + 1.0, mf);
    log.record(sum_series_from(term, min_terms(w, m), cfg))
}

/// `E[H_hat]` for a geometric(`p`) population on `{0, 1, ...}`:
/// `(1 - 1/n)(1 - p^n) - p^n ∫_0^{1-p} T(w) / (1-w)^n dw`.
pub fn expected_hoover_geometric(
    p: f64,
    n: usize,
    qcfg: &QuadratureConfig,
    scfg: &SeriesConfig,
) -> Result<ExpectationResult> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    check_n(n)?;
    let m = n - 1;
    let nf = n as f64;
    let log = NodeLog::default();

    // p^n / (1-w)^n <= 1 on the whole range, so it is folded into the integrand.
    let ln_p = p.ln();
    let integrand = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        lattice_sum(w, m, scfg, &log) * (nf * (ln_p - (-w).ln_1p())).exp()
    };
    // (p / (1-w))^n confines the mass to a window of width O(p/n) below 1-p.
    let split = (1.0 - p) - WINDOW * p / nf;
    let res = integrate_windowed(integrand, 0.0, split, 1.0 - p, qcfg);
    let (q, max_terms, max_tail) = log.finish(res)?;

    Ok(ExpectationResult {
        value: geometric_upper_bound(p, n) - q.value,
        err_est: q.err_est,
        method: "geometric_tilted_lattice",
        diagnostics: Diagnostics {
            subintervals: q.subintervals,
            evaluations: q.evaluations,
            cutoff: None,
            max_series_terms: max_terms,
            max_series_tail: max_tail,
        },
    })
}
