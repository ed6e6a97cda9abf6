//! Plug-in bias correction: fit the family by ML, evaluate the exact bias at
//! the fitted parameters, subtract it from the raw estimate.

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::Result;
use crate::estimators::{hoover_hat, Sample};
use crate::families::FamilyStrategy;
use crate::finite_sample::bias;
use crate::fitting::FitResult;
use crate::specnum::{QuadratureConfig, SeriesConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectedEstimate {
    pub raw: f64,
    pub bias_estimate: f64,
    pub corrected: f64,
    pub fit: FitResult,
    /// The corrected value fell outside the estimator's range `[0, 1 - 1/n]`.
    /// It is reported unclamped.
    pub out_of_range: bool,
}

/// Bias-corrected Hoover estimate under the model `family`.
pub fn correct_hoover(
    sample: &Sample,
    family: &dyn FamilyStrategy,
    qcfg: &QuadratureConfig,
    scfg: &SeriesConfig,
) -> Result<CorrectedEstimate> {
    correct_hoover_with(sample, family, |spec, n| Ok(bias(spec, n, qcfg, scfg)?.bias))
}

/// As [`correct_hoover`], with the bias at the fitted parameters supplied by
/// `bias_at` (for example a cached or interpolated table).
pub fn correct_hoover_with<B>(sample: &Sample, family: &dyn FamilyStrategy, bias_at: B) -> Result<CorrectedEstimate>
where
    B: FnOnce(&DistributionSpec, usize) -> Result<f64>,
{
    if family.requires_integer_data() {
        sample.check_integer()?;
    }
    let raw = hoover_hat(sample);
    let fit = family.fit(sample)?;
    let bias_estimate = bias_at(&fit.spec, sample.len())?;
    let corrected = raw - bias_estimate;
    let top = 1.0 - 1.0 / sample.len() as f64;
    Ok(CorrectedEstimate {
        raw,
        bias_estimate,
        corrected,
        fit,
        out_of_range: !(0.0..=top).contains(&corrected),
    })
}
