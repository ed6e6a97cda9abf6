//! Special functions and numerical integration/summation kernels.
//!
//! Everything here is pure and reentrant. The public functions validate
//! their arguments and return [`Result`]; the `pub(crate)` variants skip
//! validation and are meant for hot integrands whose arguments are already
//! known to be in range.

mod beta;
mod gamma;
mod quad;
mod series;

pub use beta::reg_inc_beta;
pub use gamma::{digamma, log_gamma, reg_gamma_lower, reg_gamma_upper, trigamma};
pub use quad::{integrate_finite, integrate_semi_infinite, Quadrature};
pub use series::{sum_series, sum_series_from, SeriesSum};

pub(crate) use beta::inc_beta;
pub(crate) use gamma::{gamma_p, gamma_q, ln_gamma, log_minus_digamma};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Upper bound on the neglected mass beyond the cutoff of a semi-infinite range.
    pub tail_cut_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            tail_cut_tol: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize, tail_cut_tol: f64) -> Result<Self> {
        let cfg = QuadratureConfig {
            rel_tol,
            abs_tol,
            max_subdivisions,
            tail_cut_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) || !positive(self.tail_cut_tol) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive and finite: {self:?}"
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Stopping rule for infinite series of non-negative terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Stop once the largest of the last three terms is below this fraction of the partial sum.
    pub term_rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            term_rel_tol: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesConfig {
    pub fn new(term_rel_tol: f64, max_terms: usize) -> Result<Self> {
        let cfg = SeriesConfig {
            term_rel_tol,
            max_terms,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.term_rel_tol.is_finite() && self.term_rel_tol > 0.0) {
            return Err(Error::Config(format!(
                "term_rel_tol must be positive, got {}",
                self.term_rel_tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        Ok(())
    }
}
