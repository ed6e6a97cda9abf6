use rand_distr::{Distribution, Gamma as GammaDist};
use rayon::prelude::*;
use serde::Serialize;

use super::check_n;
use crate::distributions::{stream_rng, Seed};
use crate::error::{Error, Result};

const BATCH: usize = 1 << 16;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub draws: usize,
}

/// Direct simulation of `E[min{(n-1) U, V}]` with `U ~ Gamma(alpha, 1)` and
/// `V ~ Gamma((n-1) alpha, 1)`, independent.
///
/// Draws are split into fixed-size batches on their own streams and merged in
/// batch order, so the result does not depend on the thread count.
pub fn min_tilted_oracle(alpha: f64, n: usize, draws: usize, seed: Seed) -> Result<OracleEstimate> {
    check_n(n)?;
    if draws < 2 {
        return Err(Error::domain("oracle needs at least 2 draws"));
    }
    let m = (n - 1) as f64;
    let u_dist = GammaDist::new(alpha, 1.0).map_err(|e| Error::domain(format!("alpha={alpha}: {e}")))?;
    let v_dist = GammaDist::new(m * alpha, 1.0).map_err(|e| Error::domain(format!("alpha={alpha}: {e}")))?;

    let batches = draws.div_ceil(BATCH);
    let parts: Vec<(usize, f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH.min(draws - b * BATCH);
            let mut rng = stream_rng(seed, b as u64);
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for i in 0..count {
                let x = (m * u_dist.sample(&mut rng)).min(v_dist.sample(&mut rng));
                let d = x - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (x - mean);
            }
            (count, mean, m2)
        })
        .collect();

    let (mut count, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for (c, mb, m2b) in parts {
        let total = count + c;
        let d = mb - mean;
        mean += d * c as f64 / total as f64;
        m2 += m2b + d * d * (count as f64) * (c as f64) / total as f64;
        count = total;
    }
    let var = m2 / (count - 1) as f64;
    Ok(OracleEstimate {
        mean,
        std_error: (var / count as f64).sqrt(),
        draws: count,
    })
}
