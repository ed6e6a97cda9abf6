//! Population families as interchangeable strategies.
//!
//! Each family contributes two trait objects: a [`FamilyStrategy`], looked
//! up by name in a [`Registry`] (spec parsing and ML fitting), and a
//! [`Population`], implemented by the family's parameter struct (moments,
//! CDF, sampling, population index, exact expectation of the estimator).
//! The command line and simulation configs only ever go through these.

mod gamma;
mod geometric;
mod poisson;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, StreamRng};
use crate::error::{Error, Result};
use crate::estimators::Sample;
use crate::finite_sample::ExpectationResult;
use crate::fitting::FitResult;
use crate::hoover_core::IndexValue;
use crate::specnum::{QuadratureConfig, SeriesConfig};

pub use gamma::GammaFamily;
pub use geometric::GeometricFamily;
pub use poisson::PoissonFamily;

/// Tag of a built-in family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Gamma,
    Poisson,
    Geometric,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Gamma => "gamma",
            FamilyKind::Poisson => "poisson",
            FamilyKind::Geometric => "geometric",
        }
    }

    /// Strategy registered under this family's name in the built-in registry.
    pub fn strategy(self) -> &'static dyn FamilyStrategy {
        Registry::builtin()
            .get(self.name())
            .expect("built-in families are always registered")
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Registry::builtin()
            .get(s.trim())
            .map(|f| f.kind())
            .ok_or_else(|| Error::InvalidSpec {
                input: s.to_string(),
                reason: format!("unknown family; expected one of {:?}", Registry::builtin().names()),
            })
    }
}

/// Family behaviour attached to a concrete parameter set.
pub trait Population: Send + Sync + fmt::Debug {
    fn family(&self) -> FamilyKind;

    fn mean(&self) -> f64;

    fn cdf(&self, t: f64) -> f64;

    /// Support is a subset of `{0, 1, ...}`.
    fn is_discrete(&self) -> bool;

    /// Overwrites `out` with independent draws.
    fn fill(&self, rng: &mut StreamRng, out: &mut [f64]);

    /// Population Hoover index from the family's closed form.
    fn hoover(&self) -> IndexValue;

    /// Exact `E[H_hat]` for samples of size `n`.
    fn expected_hoover(&self, n: usize, qcfg: &QuadratureConfig, scfg: &SeriesConfig) -> Result<ExpectationResult>;

    /// Analytic upper bound on `E[H_hat]` (the lower bound is always 0).
    fn expectation_upper_bound(&self, n: usize) -> f64;
}

/// Name-addressable entry point of a family.
pub trait FamilyStrategy: Send + Sync {
    fn kind(&self) -> FamilyKind;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Builds a spec from `key=value` pairs of the text form.
    fn build(&self, params: &[(&str, f64)]) -> Result<DistributionSpec>;

    /// Whether observations must be integers for this family's likelihood.
    fn requires_integer_data(&self) -> bool;

    /// Maximum-likelihood fit to `sample`.
    fn fit(&self, sample: &Sample) -> Result<FitResult>;
}

/// Families selectable by name.
pub struct Registry {
    strategies: Vec<Box<dyn FamilyStrategy>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { strategies: Vec::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Registry::empty();
        reg.register(Box::new(GammaFamily)).expect("fresh registry");
        reg.register(Box::new(PoissonFamily)).expect("fresh registry");
        reg.register(Box::new(GeometricFamily)).expect("fresh registry");
        reg
    }

    /// Process-wide registry holding the built-in families.
    pub fn builtin() -> &'static Registry {
        static BUILTIN: OnceLock<Registry> = OnceLock::new();
        BUILTIN.get_or_init(Registry::with_builtins)
    }

    pub fn register(&mut self, strategy: Box<dyn FamilyStrategy>) -> Result<()> {
        if self.get(strategy.name()).is_some() {
            return Err(Error::Config(format!(
                "family `{}` is already registered",
                strategy.name()
            )));
        }
        self.strategies.push(strategy);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn FamilyStrategy> {
        self.strategies
            .iter()
            .find(|s| s.name().eq_ignore_ascii_case(name))
            .map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    /// Parses `family:key=value,key=value`.
    pub fn parse_spec(&self, input: &str) -> Result<DistributionSpec> {
        let bad = |reason: String| Error::InvalidSpec {
            input: input.to_string(),
            reason,
        };
        let (name, rest) = input
            .trim()
            .split_once(':')
            .ok_or_else(|| bad("expected `family:key=value,...`".into()))?;
        let strategy = self
            .get(name.trim())
            .ok_or_else(|| bad(format!("unknown family `{name}`; expected one of {:?}", self.names())))?;

        let mut params: Vec<(&str, f64)> = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("parameter `{item}` is not of the form key=value")))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("value of `{key}` is not a number")))?;
            if params.iter().any(|(k, _)| *k == key) {
                return Err(bad(format!("parameter `{key}` given twice")));
            }
            params.push((key, value));
        }
        strategy.build(&params).map_err(|e| match e {
            Error::InvalidSpec { reason, .. } => bad(reason),
            other => other,
        })
    }
}

/// Pulls the named parameters out of `params`, rejecting unknown keys.
/// `None` in `defaults` marks a required parameter.
pub(crate) fn take_params<const N: usize>(
    family: &str,
    params: &[(&str, f64)],
    keys: [(&str, Option<f64>); N],
) -> Result<[f64; N]> {
    let invalid = |reason: String| Error::InvalidSpec {
        input: family.to_string(),
        reason,
    };
    if let Some((unknown, _)) = params.iter().find(|(k, _)| !keys.iter().any(|(name, _)| name == k)) {
        return Err(invalid(format!("unknown parameter `{unknown}` for {family}")));
    }
    let mut out = [0.0; N];
    for (slot, (name, default)) in out.iter_mut().zip(keys) {
        *slot = match params.iter().find(|(k, _)| *k == name) {
            Some((_, v)) => *v,
            None => default.ok_or_else(|| invalid(format!("missing parameter `{name}`")))?,
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        assert_eq!(Registry::builtin().names(), vec!["gamma", "poisson", "geometric"]);
        for kind in [FamilyKind::Gamma, FamilyKind::Poisson, FamilyKind::Geometric] {
            assert_eq!(kind.strategy().kind(), kind);
            assert_eq!(kind.name().parse::<FamilyKind>().unwrap(), kind);
        }
        assert!("lognormal".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn duplicate_registration_is_rejected() {
        let mut reg = Registry::with_builtins();
        assert!(reg.register(Box::new(GammaFamily)).is_err());
        let mut reg = Registry::empty();
        assert!(reg.register(Box::new(PoissonFamily)).is_ok());
        assert!(reg.parse_spec("gamma:alpha=1").is_err());
        assert!(reg.parse_spec("poisson:lambda=1").is_ok());
    }

    #[test]
    fn parse_errors() {
        let reg = Registry::builtin();
        for bad in [
            "gamma",
            "gamma:alpha",
            "gamma:alpha=x",
            "gamma:alpha=1,alpha=2",
            "gamma:alpha=1,shape=2",
            "gamma:rate=2",
            "gamma:alpha=-1",
            "poisson:lambda=0",
            "geometric:p=1.5",
            "weibull:k=2",
        ] {
            assert!(
                matches!(reg.parse_spec(bad), Err(Error::InvalidSpec { .. })),
                "{bad} should be rejected"
            );
        }
    }

    #[test]
    fn parse_accepts_whitespace_and_default_rate() {
        let spec = Registry::builtin().parse_spec(" gamma: alpha = 2 ").unwrap();
        assert_eq!(spec, DistributionSpec::gamma(2.0, 1.0).unwrap());
        let spec = Registry::builtin().parse_spec("Poisson:lambda=2.5").unwrap();
        assert_eq!(spec, DistributionSpec::poisson(2.5).unwrap());
    }
}
