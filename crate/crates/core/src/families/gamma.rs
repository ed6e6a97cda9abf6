use super::{take_params, FamilyKind, FamilyStrategy, Population};
use crate::distributions::{DistributionSpec, Gamma, StreamRng};
use crate::error::Result;
use crate::estimators::Sample;
use crate::finite_sample::{expected_hoover_gamma, ExpectationResult};
use crate::fitting::{fit_gamma_ml, FitResult, GAMMA_FIT_MAX_ITER, GAMMA_FIT_TOL};
use crate::hoover_core::{hoover_gamma, IndexValue};
use crate::specnum::{QuadratureConfig, SeriesConfig};

/// `gamma:alpha=A,rate=L` (rate defaults to 1).
#[derive(Debug, Clone, Copy, Default)]
pub struct GammaFamily;

impl FamilyStrategy for GammaFamily {
    fn kind(&self) -> FamilyKind {
        FamilyKind::Gamma
    }

    fn build(&self, params: &[(&str, f64)]) -> Result<DistributionSpec> {
        let [alpha, rate] = take_params("gamma", params, [("alpha", None), ("rate", Some(1.0))])?;
        DistributionSpec::gamma(alpha, rate)
    }

    fn requires_integer_data(&self) -> bool {
        false
    }

    fn fit(&self, sample: &Sample) -> Result<FitResult> {
        fit_gamma_ml(sample, GAMMA_FIT_TOL, GAMMA_FIT_MAX_ITER)
    }
}

impl Population for Gamma {
    fn family(&self) -> FamilyKind {
        FamilyKind::Gamma
    }

    fn mean(&self) -> f64 {
        Gamma::mean(self)
    }

    fn cdf(&self, t: f64) -> f64 {
        Gamma::cdf(self, t)
    }

    fn is_discrete(&self) -> bool {
        false
    }

    fn fill(&self, rng: &mut StreamRng, out: &mut [f64]) {
        Gamma::fill(self, rng, out)
    }

    fn hoover(&self) -> IndexValue {
        IndexValue::closed_form(hoover_gamma(self.shape()))
    }

    // The rate never enters: the estimator is scale invariant.
    fn expected_hoover(&self, n: usize, qcfg: &QuadratureConfig, _scfg: &SeriesConfig) -> Result<ExpectationResult> {
        expected_hoover_gamma(self.shape(), n, qcfg)
    }

    fn expectation_upper_bound(&self, n: usize) -> f64 {
        1.0 - 1.0 / n as f64
    }
}
