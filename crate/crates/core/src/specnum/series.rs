use serde::Serialize;

use super::SeriesConfig;
use crate::error::{Error, Result};

/// Terms below this count as zero when the partial sum is still zero.
const ABS_FLOOR: f64 = 1e-300;

/// Truncated sum of a series of non-negative terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    pub terms_used: usize,
    /// Geometric extrapolation of the omitted tail from the last few terms.
    pub tail_bound: f64,
}

/// Sums `term(0) + term(1) + ...` until the largest of the last three terms
/// is at most `term_rel_tol` times the partial sum.
pub fn sum_series<F: FnMut(usize) -> f64>(term: F, cfg: &SeriesConfig) -> Result<SeriesSum> {
    sum_series_from(term, 0, cfg)
}

/// Like [`sum_series`], but never stops before `min_terms` terms have been added.
pub fn sum_series_from<F: FnMut(usize) -> f64>(mut term: F, min_terms: usize, cfg: &SeriesConfig) -> Result<SeriesSum> {
    cfg.validate()?;
    let mut sum = 0.0;
    let mut last = [0.0f64; 3];
    for k in 0..cfg.max_terms {
        let t = term(k);
        if !t.is_finite() {
            return Err(Error::domain(format!("series term {k} is not finite ({t})")));
        }
        sum += t;
        last.rotate_left(1);
        last[2] = t;

        let used = k + 1;
        if used < 3 || used < min_terms {
            continue;
        }
        let recent = last[0].abs().max(last[1].abs()).max(last[2].abs());
        let done = if sum == 0.0 {
            recent <= ABS_FLOOR
        } else {
            recent <= cfg.term_rel_tol * sum.abs()
        };
        if done {
            return Ok(SeriesSum {
                value: sum,
                terms_used: used,
                tail_bound: tail_bound(&last),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "series summation",
        best: sum,
        err_est: tail_bound(&last),
    })
}

fn tail_bound(last: &[f64; 3]) -> f64 {
    let recent = last.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if recent == 0.0 {
        return 0.0;
    }
    let mut ratio = 0.0f64;
    for pair in last.windows(2) {
        if pair[0] != 0.0 {
            ratio = ratio.max((pair[1] / pair[0]).abs());
        } else if pair[1] != 0.0 {
            return f64::INFINITY;
        }
    }
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        recent * ratio / (1.0 - ratio)
    }
}
