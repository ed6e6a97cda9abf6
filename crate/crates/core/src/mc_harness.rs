//! Monte Carlo study of the raw and bias-corrected Hoover estimators.
//!
//! Replication `r` of grid cell `c` draws from stream `(c << 32) | r` of the
//! configured seed, so every number is reproducible and independent of how
//! many threads run the work. Per-replication results are collected in
//! replication order and reduced in that order.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli_io::round_sig;
use crate::distributions::{sample, DistributionSpec, Seed};
use crate::error::{Error, Result};
use crate::estimators::{hoover_hat, pairwise_sum, Sample};
use crate::finite_sample::{bias, expected_hoover_gamma};
use crate::hoover_core::hoover_gamma;
use crate::specnum::{QuadratureConfig, SeriesConfig};

/// How the bias at each replication's fitted parameters is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasMode {
    /// Gamma: cubic interpolation on a log-shape grid built for the cell.
    /// Discrete families always use memoized exact values.
    #[default]
    Interpolated,
    /// Exact evaluation for every distinct fitted parameter.
    Exact,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub specs: Vec<DistributionSpec>,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub seed: Seed,
    #[serde(default = "default_true")]
    pub apply_correction: bool,
    #[serde(default)]
    pub bias_mode: BiasMode,
    /// Thread count; results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.specs.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::Config("grid needs at least one spec and one sample size".into()));
        }
        if self.replications < 2 {
            return Err(Error::Config(format!(
                "replications must be at least 2, got {}",
                self.replications
            )));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("sample sizes must be at least 2, got {n}")));
        }
        if self.sample_sizes.iter().any(|&n| n > u32::MAX as usize) || self.replications > u32::MAX as usize {
            return Err(Error::Config(
                "sample sizes and replications must fit in 32 bits".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }
}

/// Options shared by every cell of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub apply_correction: bool,
    pub bias_mode: BiasMode,
    pub qcfg: QuadratureConfig,
    pub scfg: SeriesConfig,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            apply_correction: true,
            bias_mode: BiasMode::Interpolated,
            qcfg: QuadratureConfig::default(),
            scfg: SeriesConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationInfo {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub knots: usize,
    /// Largest interpolation error seen at the midpoints between knots.
    pub max_check_error: f64,
}

/// Metrics for one `(spec, n)` cell. Corrected-estimator fields are `None`
/// when correction is off.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationCell {
    pub spec: DistributionSpec,
    pub n: usize,
    pub replications: usize,
    pub seed: Seed,
    pub h_true: f64,
    /// Replications where fitting or bias evaluation failed; excluded from every metric.
    pub failures: usize,
    pub mean_raw: f64,
    pub relbias_raw: f64,
    pub rmse_raw: f64,
    pub se_relbias_raw: f64,
    pub mean_corr: Option<f64>,
    pub relbias_corr: Option<f64>,
    pub rmse_corr: Option<f64>,
    pub se_relbias_corr: Option<f64>,
    /// Corrected estimates outside `[0, 1 - 1/n]` (kept unclamped).
    pub out_of_range: usize,
    pub interpolation: Option<InterpolationInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub index: usize,
    pub spec: DistributionSpec,
    pub n: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub cells: Vec<SimulationCell>,
    pub errors: Vec<CellFailure>,
}

/// One cell on streams `0..replications`.
pub fn run_cell(
    spec: &DistributionSpec,
    n: usize,
    replications: usize,
    seed: Seed,
    opts: &RunOptions,
) -> Result<SimulationCell> {
    run_cell_on(spec, n, replications, seed, 0, opts)
}

fn stream_of(cell: usize, rep: usize) -> u64 {
    ((cell as u64) << 32) | rep as u64
}

fn run_cell_on(
    spec: &DistributionSpec,
    n: usize,
    replications: usize,
    seed: Seed,
    cell: usize,
    opts: &RunOptions,
) -> Result<SimulationCell> {
    if n < 2 || replications < 2 {
        return Err(Error::Config(format!(
            "need n >= 2 and replications >= 2, got n={n}, R={replications}"
        )));
    }
    let strategy = spec.family().strategy();
    let reps: Vec<(f64, Option<Result<DistributionSpec>>)> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let x = Sample::new(sample(spec, n, seed, stream_of(cell, r))).expect("generated samples are valid");
            let raw = hoover_hat(&x);
            let fit = opts.apply_correction.then(|| strategy.fit(&x).map(|f| f.spec));
            (raw, fit)
        })
        .collect();

    let h = spec.population().hoover().value;
    let mut cell_out = SimulationCell {
        spec: *spec,
        n,
        replications,
        seed,
        h_true: h,
        failures: 0,
        mean_raw: f64::NAN,
        relbias_raw: f64::NAN,
        rmse_raw: f64::NAN,
        se_relbias_raw: f64::NAN,
        mean_corr: None,
        relbias_corr: None,
        rmse_corr: None,
        se_relbias_corr: None,
        out_of_range: 0,
        interpolation: None,
    };

    if !opts.apply_correction {
        let raw: Vec<f64> = reps.iter().map(|r| r.0).collect();
        let m = Metrics::of(&raw, h);
        cell_out.mean_raw = m.mean;
        cell_out.relbias_raw = m.relbias;
        cell_out.rmse_raw = m.rmse;
        cell_out.se_relbias_raw = m.se_relbias;
        return Ok(cell_out);
    }

    let fitted: Vec<DistributionSpec> = reps
        .iter()
        .filter_map(|(_, f)| f.as_ref().and_then(|f| f.as_ref().ok()).copied())
        .collect();
    let (biases, info) = bias_at_fits(&fitted, n, opts);
    cell_out.interpolation = info;

    let mut raw = Vec::with_capacity(replications);
    let mut corrected = Vec::with_capacity(replications);
    let mut first_error = None;
    let mut next_bias = biases.into_iter();
    for (r, fit) in &reps {
        let b = match fit {
            Some(Ok(_)) => next_bias.next().expect("one bias per successful fit"),
            Some(Err(e)) => Err(e.clone()),
            None => unreachable!("correction is on"),
        };
        match b {
            Ok(b) => {
                raw.push(*r);
                corrected.push(r - b);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    cell_out.failures = replications - raw.len();
    if raw.is_empty() {
        let e = first_error.expect("failures were recorded");
        return Err(Error::Degenerate(format!(
            "all {replications} replications failed; first error: {e}"
        )));
    }

    let m = Metrics::of(&raw, h);
    cell_out.mean_raw = m.mean;
    cell_out.relbias_raw = m.relbias;
    cell_out.rmse_raw = m.rmse;
    cell_out.se_relbias_raw = m.se_relbias;
    let c = Metrics::of(&corrected, h);
    cell_out.mean_corr = Some(c.mean);
    cell_out.relbias_corr = Some(c.relbias);
    cell_out.rmse_corr = Some(c.rmse);
    cell_out.se_relbias_corr = Some(c.se_relbias);
    let top = 1.0 - 1.0 / n as f64;
    cell_out.out_of_range = corrected.iter().filter(|v| !(0.0..=top).contains(*v)).count();
    Ok(cell_out)
}

struct Metrics {
    mean: f64,
    relbias: f64,
    rmse: f64,
    se_relbias: f64,
}

impl Metrics {
    fn of(values: &[f64], h: f64) -> Metrics {
        let count = values.len() as f64;
        let rel: Vec<f64> = values.iter().map(|v| (v - h) / h).collect();
        let relbias = pairwise_sum(&rel) / count;
        let sq_dev: Vec<f64> = rel.iter().map(|e| (e - relbias).powi(2)).collect();
        let se_relbias = if values.len() > 1 {
            (pairwise_sum(&sq_dev) / (count - 1.0) / count).sqrt()
        } else {
            f64::NAN
        };
        let sq_err: Vec<f64> = values.iter().map(|v| (v - h).powi(2)).collect();
        Metrics {
            mean: pairwise_sum(values) / count,
            relbias,
            rmse: (pairwise_sum(&sq_err) / count).sqrt(),
            se_relbias,
        }
    }
}

fn bias_at_fits(
    fits: &[DistributionSpec],
    n: usize,
    opts: &RunOptions,
) -> (Vec<Result<f64>>, Option<InterpolationInfo>) {
    let shapes: Option<Vec<f64>> = fits
        .iter()
        .map(|s| match s {
            DistributionSpec::Gamma(g) => Some(g.shape()),
            _ => None,
        })
        .collect();
    if let (BiasMode::Interpolated, Some(shapes)) = (opts.bias_mode, shapes) {
        if !shapes.is_empty() {
            let lo = shapes.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = shapes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // A table that cannot be built (extreme fitted shapes) falls back to exact values.
            if let Ok(table) = BiasTable::build(lo, hi, n, INTERPOLATION_TOL, &opts.qcfg) {
                let values = shapes.iter().map(|&a| Ok(table.eval(a))).collect();
                return (values, Some(table.info()));
            }
        }
    }
    (memoized_exact(fits, n, opts), None)
}

fn bias_key(spec: &DistributionSpec) -> u64 {
    match spec {
        // the gamma bias does not depend on the rate
        DistributionSpec::Gamma(g) => g.shape().to_bits(),
        DistributionSpec::Poisson(p) => p.lambda().to_bits(),
        DistributionSpec::Geometric(g) => g.p().to_bits(),
    }
}

fn memoized_exact(fits: &[DistributionSpec], n: usize, opts: &RunOptions) -> Vec<Result<f64>> {
    let mut distinct: Vec<(u64, DistributionSpec)> = fits.iter().map(|s| (bias_key(s), *s)).collect();
    distinct.sort_by_key(|(k, _)| *k);
    distinct.dedup_by_key(|(k, _)| *k);
    let computed: HashMap<u64, Result<f64>> = distinct
        .par_iter()
        .map(|(k, s)| (*k, bias(s, n, &opts.qcfg, &opts.scfg).map(|r| r.bias)))
        .collect();
    fits.iter().map(|s| computed[&bias_key(s)].clone()).collect()
}

pub const INTERPOLATION_TOL: f64 = 1e-6;
const INITIAL_KNOTS: usize = 200;
const MAX_KNOTS: usize = 200 * 64;

/// Gamma bias `alpha -> E[H_hat](alpha, n) - H(alpha)` tabulated on a grid
/// uniform in `ln alpha` and read back by local cubic Lagrange interpolation.
#[derive(Debug, Clone)]
pub struct BiasTable {
    n: usize,
    log_lo: f64,
    step: f64,
    values: Vec<f64>,
    max_check_error: f64,
}

fn exact_gamma_bias(alpha: f64, n: usize, qcfg: &QuadratureConfig) -> Result<f64> {
    Ok(expected_hoover_gamma(alpha, n, qcfg)?.value - hoover_gamma(alpha))
}

impl BiasTable {
    /// Builds a table over `[alpha_lo, alpha_hi]`, doubling the knot count
    /// until the error at every midpoint between knots is below `tol`.
    pub fn build(alpha_lo: f64, alpha_hi: f64, n: usize, tol: f64, qcfg: &QuadratureConfig) -> Result<BiasTable> {
        if !(alpha_lo > 0.0 && alpha_hi >= alpha_lo && alpha_hi.is_finite()) {
            return Err(Error::domain(format!("bad shape range [{alpha_lo}, {alpha_hi}]")));
        }
        let mut log_lo = alpha_lo.ln();
        let mut log_hi = alpha_hi.ln();
        if log_hi - log_lo < 1e-3 {
            log_lo -= 5e-4;
            log_hi += 5e-4;
        }
        let eval_at =
            |xs: &[f64]| -> Result<Vec<f64>> { xs.par_iter().map(|&x| exact_gamma_bias(x.exp(), n, qcfg)).collect() };

        let mut knots = INITIAL_KNOTS;
        let mut step = (log_hi - log_lo) / (knots - 1) as f64;
        let xs: Vec<f64> = (0..knots).map(|i| log_lo + i as f64 * step).collect();
        let mut values = eval_at(&xs)?;
        loop {
            let mids: Vec<f64> = (0..knots - 1).map(|i| log_lo + (i as f64 + 0.5) * step).collect();
            let exact = eval_at(&mids)?;
            let table = BiasTable {
                n,
                log_lo,
                step,
                values,
                max_check_error: 0.0,
            };
            let err = mids
                .iter()
                .zip(&exact)
                .map(|(&x, &e)| (table.eval_log(x) - e).abs())
                .fold(0.0, f64::max);
            if err < tol {
                return Ok(BiasTable {
                    max_check_error: err,
                    ..table
                });
            }
            if 2 * knots - 1 > MAX_KNOTS {
                return Err(Error::NonConvergence {
                    what: "bias interpolation table",
                    best: err,
                    err_est: err,
                });
            }
            // the midpoints become the new knots
            let mut merged = Vec::with_capacity(2 * knots - 1);
            for (i, v) in table.values.iter().enumerate() {
                merged.push(*v);
                if i < exact.len() {
                    merged.push(exact[i]);
                }
            }
            values = merged;
            knots = values.len();
            step *= 0.5;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        self.eval_log(alpha.ln())
    }

    fn eval_log(&self, x: f64) -> f64 {
        let k = self.values.len();
        let t = (x - self.log_lo) / self.step;
        let j = (t.floor() as isize).clamp(1, k as isize - 3) as usize;
        let u = t - j as f64;
        let [y0, y1, y2, y3] = [
            self.values[j - 1],
            self.values[j],
            self.values[j + 1],
            self.values[j + 2],
        ];
        // nodes at u = -1, 0, 1, 2
        let l0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let l2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
    }

    pub fn info(&self) -> InterpolationInfo {
        InterpolationInfo {
            alpha_min: self.log_lo.exp(),
            alpha_max: (self.log_lo + self.step * (self.values.len() - 1) as f64).exp(),
            knots: self.values.len(),
            max_check_error: self.max_check_error,
        }
    }
}

/// Every `(spec, n)` cell of the grid, spec-major, in input order.
pub fn run_grid(cfg: &SimulationConfig, qcfg: &QuadratureConfig, scfg: &SeriesConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let opts = RunOptions {
        apply_correction: cfg.apply_correction,
        bias_mode: cfg.bias_mode,
        qcfg: *qcfg,
        scfg: *scfg,
    };
    let run = || {
        let mut cells = Vec::new();
        let mut errors = Vec::new();
        let pairs = cfg
            .specs
            .iter()
            .flat_map(|s| cfg.sample_sizes.iter().map(move |&n| (s, n)));
        for (index, (spec, n)) in pairs.enumerate() {
            match run_cell_on(spec, n, cfg.replications, cfg.seed, index, &opts) {
                Ok(c) => cells.push(c),
                Err(e) => errors.push(CellFailure {
                    index,
                    spec: *spec,
                    n,
                    error: e.to_string(),
                }),
            }
        }
        SimulationReport {
            config: cfg.clone(),
            cells,
            errors,
        }
    };
    match cfg.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

pub const CSV_COLUMNS: [&str; 13] = [
    "family",
    "params",
    "n",
    "R",
    "seed",
    "H_true",
    "relbias_raw",
    "relbias_corr",
    "rmse_raw",
    "rmse_corr",
    "se_relbias_raw",
    "se_relbias_corr",
    "failures",
];

fn params_of(spec: &DistributionSpec) -> String {
    let s = spec.to_string();
    s.split_once(':').map(|(_, p)| p.to_string()).unwrap_or_default()
}

/// One row per cell, columns as in [`CSV_COLUMNS`]. Reals carry 12
/// significant digits; missing corrected metrics are empty fields.
pub fn write_csv<W: Write>(cells: &[SimulationCell], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let num = |x: f64| round_sig(x, 12).to_string();
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for c in cells {
        w.write_record([
            c.spec.family().name().to_string(),
            params_of(&c.spec),
            c.n.to_string(),
            c.replications.to_string(),
            c.seed.0.to_string(),
            num(c.h_true),
            num(c.relbias_raw),
            opt(c.relbias_corr),
            num(c.rmse_raw),
            opt(c.rmse_corr),
            num(c.se_relbias_raw),
            opt(c.se_relbias_corr),
            c.failures.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
