//! Population Hoover index: closed forms for the built-in families, the
//! generic CDF characterizations they are checked against, and the gamma
//! Gini coefficient.

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::specnum::{gamma_q, integrate_finite, ln_gamma, QuadratureConfig};

/// How an [`IndexValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexMethod {
    ClosedForm,
    GenericIntegral,
    GenericSum,
}

impl IndexMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexMethod::ClosedForm => "closed_form",
            IndexMethod::GenericIntegral => "generic_integral",
            IndexMethod::GenericSum => "generic_sum",
        }
    }
}

/// An inequality index in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexValue {
    pub value: f64,
    pub method: IndexMethod,
    pub err_est: f64,
}

impl IndexValue {
    pub fn closed_form(value: f64) -> Self {
        IndexValue {
            value,
            method: IndexMethod::ClosedForm,
            err_est: 0.0,
        }
    }
}

/// Hoover index of `spec` from its family's closed form.
pub fn hoover_closed(spec: &DistributionSpec) -> IndexValue {
    spec.population().hoover()
}

/// Gamma closed form `alpha^{alpha-1} e^{-alpha} / Gamma(alpha)`; free of the rate.
///
/// This is also the Gamma(alpha, 1) density evaluated at `alpha`.
pub fn hoover_gamma(alpha: f64) -> f64 {
    ((alpha - 1.0) * alpha.ln() - alpha - ln_gamma(alpha)).exp()
}

/// Poisson closed form,
/// `(1/lambda) [sum_{k<floor(lambda)} Q(k+1, lambda) + frac(lambda) Q(floor(lambda)+1, lambda)]`.
pub fn hoover_poisson(lambda: f64) -> f64 {
    floor_guarded(lambda, |fl, frac| {
        let mut sum = 0.0;
        let mut k = 0.0;
        while k < fl {
            sum += gamma_q(k + 1.0, lambda);
            k += 1.0;
        }
        if frac != 0.0 {
            sum += frac * gamma_q(fl + 1.0, lambda);
        }
        sum / lambda
    })
}

/// Geometric closed form `p (1 + m) (1-p)^m` with `m = floor((1-p)/p)`.
pub fn hoover_geometric(p: f64) -> f64 {
    let mu = (1.0 - p) / p;
    floor_guarded(mu, |m, _| p * (1.0 + m) * (m * (-p).ln_1p()).exp())
}

/// Below this distance from an integer, `floor(mu)` is treated as unstable.
const FLOOR_GUARD: f64 = 1e-12;
const FLOOR_AGREEMENT: f64 = 1e-10;

/// Evaluates `eval(floor(mu), mu - floor(mu))`. An exactly integral `mu`
/// gets a zero fractional part; a `mu` within `FLOOR_GUARD` of an integer is
/// also evaluated on the neighbouring branch and the two must agree.
fn floor_guarded<F: Fn(f64, f64) -> f64>(mu: f64, eval: F) -> f64 {
    let fl = mu.floor();
    let frac = mu - fl;
    let primary = eval(fl, frac);
    if frac == 0.0 {
        return primary;
    }
    let nearest = mu.round();
    if (mu - nearest).abs() < FLOOR_GUARD {
        let alt_floor = if nearest > fl { nearest } else { fl - 1.0 };
        if alt_floor >= 0.0 {
            let alt = eval(alt_floor, mu - alt_floor);
            debug_assert!(
                (alt - primary).abs() <= FLOOR_AGREEMENT,
                "floor branches disagree at mu={mu}: {primary} vs {alt}"
            );
        }
    }
    primary
}

/// `(1/mu) ∫_0^mu F(t) dt` for a continuous CDF `cdf` with mean `mu`.
pub fn hoover_generic_continuous<F>(cdf: F, mu: f64, cfg: &QuadratureConfig) -> Result<IndexValue>
where
    F: Fn(f64) -> f64,
{
    check_mean(mu)?;
    let q = integrate_finite(cdf, 0.0, mu, cfg)?;
    Ok(IndexValue {
        value: q.value / mu,
        method: IndexMethod::GenericIntegral,
        err_est: q.err_est / mu,
    })
}

/// `(1/mu) [sum_{k<floor(mu)} F(k) + (mu - floor(mu)) F(floor(mu))]` for a
/// variable on `{0, 1, ...}` whose CDF at integer `k` is `cdf_at(k)`.
pub fn hoover_generic_discrete<F>(cdf_at: F, mu: f64) -> Result<IndexValue>
where
    F: Fn(u64) -> f64,
{
    check_mean(mu)?;
    let value = floor_guarded(mu, |fl, frac| {
        let top = fl as u64;
        let mut sum: f64 = (0..top).map(&cdf_at).sum();
        if frac != 0.0 {
            sum += frac * cdf_at(top);
        }
        sum / mu
    });
    Ok(IndexValue {
        value,
        method: IndexMethod::GenericSum,
        err_est: 0.0,
    })
}

fn check_mean(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("mean must be positive and finite, got {mu}")))
    }
}

/// Gamma Gini coefficient `Gamma(alpha + 1/2) / (sqrt(pi) alpha Gamma(alpha))`.
pub fn gini_gamma(alpha: f64) -> Result<IndexValue> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("gini_gamma requires alpha > 0, got {alpha}")));
    }
    let ln = ln_gamma(alpha + 0.5) - ln_gamma(alpha) - alpha.ln() - 0.5 * std::f64::consts::PI.ln();
    Ok(IndexValue::closed_form(ln.exp()))
}
