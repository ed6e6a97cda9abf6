//! Exact finite-sample expectation and bias of the Hoover estimator.
//!
//! Each family's `E[H_hat]` comes from writing `1/sum X_i` as a Laplace
//! integral and exponentially tilting the pair `((n-1) X_1, X_2 + ... + X_n)`.
//! What remains is one integral (gamma: over `[0, inf)`; Poisson and
//! geometric: over a finite range after a change of variables) whose
//! integrand is a product of regularized incomplete gamma / beta functions,
//! summed over the lattice for the discrete families.

mod gamma;
mod geometric;
mod oracle;
mod poisson;

use std::cell::{Cell, RefCell};

use serde::Serialize;

pub use gamma::{expected_hoover_gamma, min_term_integral};
pub use geometric::{expected_hoover_geometric, geometric_upper_bound};
pub use oracle::{min_tilted_oracle, OracleEstimate};
pub use poisson::{expected_hoover_poisson, poisson_upper_bound};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::specnum::{integrate_finite, Quadrature, QuadratureConfig, SeriesConfig};

/// Quadrature and series bookkeeping behind an [`ExpectationResult`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    pub subintervals: usize,
    pub evaluations: usize,
    /// Truncation point of the semi-infinite gamma integral.
    pub cutoff: Option<f64>,
    /// Most inner-series terms used at any quadrature node.
    pub max_series_terms: usize,
    /// Largest extrapolated omitted series tail at any node.
    pub max_series_tail: f64,
}

/// `E[H_hat]` with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationResult {
    pub value: f64,
    pub err_est: f64,
    /// Which representation produced the value.
    pub method: &'static str,
    pub diagnostics: Diagnostics,
}

/// `E[H_hat] - H` with the analytic bounds `-H <= bias <= upper(n) - H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasReport {
    pub spec: DistributionSpec,
    pub n: usize,
    pub hoover: f64,
    pub expected_hoover: f64,
    pub bias: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub err_est: f64,
    pub method: &'static str,
}

/// Finite-sample bias of the Hoover estimator for `spec` at sample size `n`.
pub fn bias(spec: &DistributionSpec, n: usize, qcfg: &QuadratureConfig, scfg: &SeriesConfig) -> Result<BiasReport> {
    let pop = spec.population();
    let h = pop.hoover().value;
    let expected = pop.expected_hoover(n, qcfg, scfg)?;
    Ok(BiasReport {
        spec: *spec,
        n,
        hoover: h,
        expected_hoover: expected.value,
        bias: expected.value - h,
        lower_bound: -h,
        upper_bound: pop.expectation_upper_bound(n) - h,
        err_est: expected.err_est,
        method: expected.method,
    })
}

/// Width, in units of the weight's decay scale, of the window integrated
/// separately next to an endpoint where the integrand concentrates.
pub(crate) const WINDOW: f64 = 40.0;

/// Integrates over `[lo, hi]` as `[lo, split] + [split, hi]` when `split`
/// lies strictly inside, so a narrow peak next to `hi` cannot be missed.
pub(crate) fn integrate_windowed<F>(
    mut f: F,
    lo: f64,
    split: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    if !(split > lo && split < hi) {
        return integrate_finite(f, lo, hi, cfg);
    }
    let near = integrate_finite(&mut f, split, hi, cfg)?;
    let far = integrate_finite(&mut f, lo, split, cfg)?;
    Ok(Quadrature {
        value: near.value + far.value,
        err_est: near.err_est + far.err_est,
        subintervals: near.subintervals + far.subintervals,
        evaluations: near.evaluations + far.evaluations,
        cutoff: None,
    })
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::domain(format!("sample size must be at least 2, got {n}")))
    }
}

/// Collects the first error and series statistics from inside an
/// `f64`-valued integrand, which itself can only signal failure with NaN.
#[derive(Default)]
pub(crate) struct NodeLog {
    error: RefCell<Option<Error>>,
    max_terms: Cell<usize>,
    max_tail: Cell<f64>,
}

impl NodeLog {
    pub(crate) fn record(&self, res: Result<crate::specnum::SeriesSum>) -> f64 {
        match res {
            Ok(s) => {
                self.max_terms.set(self.max_terms.get().max(s.terms_used));
                self.max_tail.set(self.max_tail.get().max(s.tail_bound));
                s.value
            }
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    /// Prefers an error recorded inside the integrand over the quadrature's own.
    pub(crate) fn finish<T>(self, res: Result<T>) -> Result<(T, usize, f64)> {
        if let Some(e) = self.error.into_inner() {
            return Err(e);
        }
        res.map(|v| (v, self.max_terms.get(), self.max_tail.get()))
    }
}
