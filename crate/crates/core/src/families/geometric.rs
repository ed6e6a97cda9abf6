use super::{take_params, FamilyKind, FamilyStrategy, Population};
use crate::distributions::{DistributionSpec, Geometric, StreamRng};
use crate::error::Result;
use crate::estimators::Sample;
use crate::finite_sample::{expected_hoover_geometric, geometric_upper_bound, ExpectationResult};
use crate::fitting::{fit_geometric_ml, FitResult};
use crate::hoover_core::{hoover_geometric, IndexValue};
use crate::specnum::{QuadratureConfig, SeriesConfig};

/// `geometric:p=P`, support `{0, 1, ...}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GeometricFamily;

impl FamilyStrategy for GeometricFamily {
    fn kind(&self) -> FamilyKind {
        FamilyKind::Geometric
    }

    fn build(&self, params: &[(&str, f64)]) -> Result<DistributionSpec> {
        let [p] = take_params("geometric", params, [("p", None)])?;
        DistributionSpec::geometric(p)
    }

    fn requires_integer_data(&self) -> bool {
        true
    }

    fn fit(&self, sample: &Sample) -> Result<FitResult> {
        fit_geometric_ml(sample)
    }
}

impl Population for Geometric {
    fn family(&self) -> FamilyKind {
        FamilyKind::Geometric
    }

    fn mean(&self) -> f64 {
        Geometric::mean(self)
    }

    fn cdf(&self, t: f64) -> f64 {
        Geometric::cdf(self, t)
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn fill(&self, rng: &mut StreamRng, out: &mut [f64]) {
        Geometric::fill(self, rng, out)
    }

    fn hoover(&self) -> IndexValue {
        IndexValue::closed_form(hoover_geometric(self.p()))
    }

    fn expected_hoover(&self, n: usize, qcfg: &QuadratureConfig, scfg: &SeriesConfig) -> Result<ExpectationResult> {
        expected_hoover_geometric(self.p(), n, qcfg, scfg)
    }

    fn expectation_upper_bound(&self, n: usize) -> f64 {
        geometric_upper_bound(self.p(), n)
    }
}
