//! Parameter-validated population models and reproducible sampling.
//!
//! A [`DistributionSpec`] has the text form `gamma:alpha=A,rate=L`,
//! `poisson:lambda=L` or `geometric:p=P`; parsing goes through the family
//! registry in [`crate::families`].

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::{FamilyKind, Population, Registry};
use crate::specnum::{gamma_p, gamma_q};

/// Generator used for every random draw in the crate.
pub type StreamRng = ChaCha8Rng;

/// Root seed; combined with a stream index it addresses one independent random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

/// Generator for `(seed, stream)`. Streams never overlap, so replication `r`
/// drawn from stream `r` is the same no matter which thread runs it.
pub fn stream_rng(seed: Seed, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(stream);
    rng
}

fn positive(name: &str, family: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidSpec {
            input: family.to_string(),
            reason: format!("{name} must be positive and finite, got {v}"),
        })
    }
}

/// Gamma population with shape `alpha` and rate `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma {
    shape: f64,
    rate: f64,
}

impl Gamma {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        Ok(Gamma {
            shape: positive("alpha", "gamma", shape)?,
            rate: positive("rate", "gamma", rate)?,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            gamma_p(self.shape, self.rate * t)
        }
    }

    pub(crate) fn fill(&self, rng: &mut StreamRng, out: &mut [f64]) {
        // Marsaglia-Tsang squeeze, with the U^{1/alpha} boost for alpha < 1
        let dist = rand_distr::Gamma::new(self.shape, 1.0 / self.rate).expect("validated gamma parameters");
        for v in out.iter_mut() {
            *v = dist.sample(rng);
        }
    }
}

/// Poisson population with mean `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poisson {
    lambda: f64,
}

/// Above this mean, inversion is replaced by a rejection sampler.
const POISSON_INVERSION_MAX: f64 = 30.0;

impl Poisson {
    pub fn new(lambda: f64) -> Result<Self> {
        Ok(Poisson {
            lambda: positive("lambda", "poisson", lambda)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.lambda
    }

    /// Right-continuous step CDF, `F(t) = Q(floor(t) + 1, lambda)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            gamma_q(t.floor() + 1.0, self.lambda)
        }
    }

    pub(crate) fn fill(&self, rng: &mut StreamRng, out: &mut [f64]) {
        if self.lambda <= POISSON_INVERSION_MAX {
            let p0 = (-self.lambda).exp();
            for v in out.iter_mut() {
                let u: f64 = rng.random();
                let mut k = 0u32;
                let mut p = p0;
                let mut cdf = p0;
                while u > cdf && p > 0.0 {
                    k += 1;
                    p *= self.lambda / k as f64;
                    cdf += p;
                }
                *v = k as f64;
            }
        } else {
            let dist = rand_distr::Poisson::new(self.lambda).expect("validated poisson mean");
            for v in out.iter_mut() {
                *v = dist.sample(rng);
            }
        }
    }
}

/// Geometric population on `{0, 1, ...}` (failures before the first success).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometric {
    p: f64,
}

impl Geometric {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 && p < 1.0 {
            Ok(Geometric { p })
        } else {
            Err(Error::InvalidSpec {
                input: "geometric".into(),
                reason: format!("p must lie in (0, 1), got {p}"),
            })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mean(&self) -> f64 {
        (1.0 - self.p) / self.p
    }

    /// `F(t) = 1 - (1-p)^{floor(t)+1}`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            -((t.floor() + 1.0) * (-self.p).ln_1p()).exp_m1()
        }
    }

    pub(crate) fn fill(&self, rng: &mut StreamRng, out: &mut [f64]) {
        let log_q = (-self.p).ln_1p();
        for v in out.iter_mut() {
            // u in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            *v = (u.ln() / log_q).floor();
        }
    }
}

/// One of the supported populations, with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Gamma(Gamma),
    Poisson(Poisson),
    Geometric(Geometric),
}

impl DistributionSpec {
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Gamma::new(shape, rate).map(DistributionSpec::Gamma)
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Poisson::new(lambda).map(DistributionSpec::Poisson)
    }

    pub fn geometric(p: f64) -> Result<Self> {
        Geometric::new(p).map(DistributionSpec::Geometric)
    }

    /// The family-specific behaviour behind this spec.
    pub fn population(&self) -> &dyn Population {
        match self {
            DistributionSpec::Gamma(g) => g,
            DistributionSpec::Poisson(p) => p,
            DistributionSpec::Geometric(g) => g,
        }
    }

    pub fn family(&self) -> FamilyKind {
        self.population().family()
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Gamma(g) => write!(f, "gamma:alpha={},rate={}", g.shape, g.rate),
            DistributionSpec::Poisson(p) => write!(f, "poisson:lambda={}", p.lambda),
            DistributionSpec::Geometric(g) => write!(f, "geometric:p={}", g.p),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Registry::builtin().parse_spec(s)
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Population mean `mu`.
pub fn mean(spec: &DistributionSpec) -> f64 {
    spec.population().mean()
}

/// `F(t) = P(X <= t)`; zero for negative `t`.
pub fn cdf(spec: &DistributionSpec, t: f64) -> f64 {
    spec.population().cdf(t)
}

/// `n` draws from `spec` using stream `stream` of `seed`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: Seed, stream: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, stream);
    let mut out = vec![0.0; n];
    spec.population().fill(&mut rng, &mut out);
    out
}
