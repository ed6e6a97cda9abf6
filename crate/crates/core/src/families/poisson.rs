use super::{take_params, FamilyKind, FamilyStrategy, Population};
use crate::distributions::{DistributionSpec, Poisson, StreamRng};
use crate::error::Result;
use crate::estimators::Sample;
use crate::finite_sample::{expected_hoover_poisson, poisson_upper_bound, ExpectationResult};
use crate::fitting::{fit_poisson_ml, FitResult};
use crate::hoover_core::{hoover_poisson, IndexValue};
use crate::specnum::{QuadratureConfig, SeriesConfig};

/// `poisson:lambda=L`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoissonFamily;

impl FamilyStrategy for PoissonFamily {
    fn kind(&self) -> FamilyKind {
        FamilyKind::Poisson
    }

    fn build(&self, params: &[(&str, f64)]) -> Result<DistributionSpec> {
        let [lambda] = take_params("poisson", params, [("lambda", None)])?;
        DistributionSpec::poisson(lambda)
    }

    fn requires_integer_data(&self) -> bool {
        true
    }

    fn fit(&self, sample: &Sample) -> Result<FitResult> {
        fit_poisson_ml(sample)
    }
}

impl Population for Poisson {
    fn family(&self) -> FamilyKind {
        FamilyKind::Poisson
    }

    fn mean(&self) -> f64 {
        Poisson::mean(self)
    }

    fn cdf(&self, t: f64) -> f64 {
        Poisson::cdf(self, t)
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn fill(&self, rng: &mut StreamRng, out: &mut [f64]) {
        Poisson::fill(self, rng, out)
    }

    fn hoover(&self) -> IndexValue {
        IndexValue::closed_form(hoover_poisson(self.lambda()))
    }

    fn expected_hoover(&self, n: usize, qcfg: &QuadratureConfig, scfg: &SeriesConfig) -> Result<ExpectationResult> {
        expected_hoover_poisson(self.lambda(), n, qcfg, scfg)
    }

    fn expectation_upper_bound(&self, n: usize) -> f64 {
        poisson_upper_bound(self.lambda(), n)
    }
}
