//! Command-line front end: argument model, dispatch to the library, and
//! JSON / CSV / plain rendering.

mod input;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

pub use input::{parse_sample, read_sample};
pub use output::{render, round_json, round_sig, Format};

use crate::correction::correct_hoover;
use crate::distributions::{DistributionSpec, Seed};
use crate::error::{Error, Result};
use crate::estimators::{gini_hat, hoover_hat};
use crate::families::Registry;
use crate::finite_sample::{bias, min_term_integral, min_tilted_oracle};
use crate::mc_harness::{run_grid, write_csv, SimulationConfig};
use crate::specnum::{QuadratureConfig, SeriesConfig};

pub const REL_TOL_ENV: &str = "INEQ_REL_TOL";
pub const SERIES_TOL_ENV: &str = "INEQ_SERIES_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "hoover",
    version,
    about = "Hoover index, finite-sample bias and bias correction"
)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Population Hoover index.
    Index {
        /// e.g. `gamma:alpha=2,rate=1`, `poisson:lambda=3`, `geometric:p=0.4`
        #[arg(long)]
        dist: String,
    },
    /// Sample Hoover (and Gini) estimate.
    Estimate {
        /// File with one value per line, or an inline list such as `1,2,3`.
        #[arg(long, allow_hyphen_values = true)]
        sample: String,
    },
    /// Exact E[H_hat] at sample size n.
    Expectation {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
    },
    /// Exact bias E[H_hat] - H at sample size n.
    Bias {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
    },
    /// ML plug-in bias-corrected estimate under a family.
    Correct {
        #[arg(long, allow_hyphen_values = true)]
        sample: String,
        #[arg(long)]
        family: String,
    },
    /// Monte Carlo study from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Simulated E[min{(n-1)U, V}] against its quadrature value (gamma).
    Oracle {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Default tolerances, overridden by `INEQ_REL_TOL` / `INEQ_SERIES_TOL`.
pub fn tolerances_from_env() -> Result<(QuadratureConfig, SeriesConfig)> {
    let read = |name: &str| -> Result<Option<f64>> {
        match std::env::var(name) {
            Ok(v) => v
                .trim()
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("{name}={v} is not a number"))),
            Err(_) => Ok(None),
        }
    };
    let mut q = QuadratureConfig::default();
    let mut s = SeriesConfig::default();
    if let Some(t) = read(REL_TOL_ENV)? {
        q.rel_tol = t;
    }
    if let Some(t) = read(SERIES_TOL_ENV)? {
        s.term_rel_tol = t;
    }
    q.validate()?;
    s.validate()?;
    Ok((q, s))
}

fn parse_dist(text: &str) -> Result<DistributionSpec> {
    Registry::builtin().parse_spec(text)
}

fn rate_note(spec: &DistributionSpec) -> Vec<String> {
    match spec {
        DistributionSpec::Gamma(g) if g.rate() != 1.0 => vec![format!(
            "rate={} does not change H, E[H_hat] or the bias: all three are scale invariant",
            g.rate()
        )],
        _ => Vec::new(),
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("records are built with json!({{...}})"),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

/// Runs one request and returns what goes to standard output.
pub fn dispatch(cli: &Cli) -> Result<String> {
    let (qcfg, scfg) = tolerances_from_env()?;
    let format = cli.format;
    match &cli.command {
        Command::Index { dist } => {
            let spec = parse_dist(dist)?;
            let h = spec.population().hoover();
            let rec = json!({
                "spec": spec.to_string(),
                "H": h.value,
                "err_est": h.err_est,
                "method": h.method.as_str(),
            });
            render(object(rec), &rate_note(&spec), format)
        }
        Command::Estimate { sample } => {
            let x = read_sample(sample)?;
            let gini = gini_hat(&x).ok();
            let rec = json!({
                "n": x.len(),
                "hoover_hat": hoover_hat(&x),
                "gini_hat": gini,
            });
            let notes = if gini.is_none() {
                vec!["sample sum is 0: hoover_hat is defined as 0, gini_hat is undefined".to_string()]
            } else {
                Vec::new()
            };
            render(object(rec), &notes, format)
        }
        Command::Expectation { dist, n } => {
            let spec = parse_dist(dist)?;
            let pop = spec.population();
            let e = pop.expected_hoover(*n, &qcfg, &scfg)?;
            let rec = json!({
                "spec": spec.to_string(),
                "n": n,
                "expected_hoover_hat": e.value,
                "err_est": e.err_est,
                "upper_bound": pop.expectation_upper_bound(*n),
                "method": e.method,
                "diagnostics": to_value(&e.diagnostics)?,
            });
            render(object(rec), &rate_note(&spec), format)
        }
        Command::Bias { dist, n } => {
            let spec = parse_dist(dist)?;
            let b = bias(&spec, *n, &qcfg, &scfg)?;
            let rec = json!({
                "spec": spec.to_string(),
                "n": n,
                "H": b.hoover,
                "expected_hoover_hat": b.expected_hoover,
                "bias": b.bias,
                "lower_bound": b.lower_bound,
                "upper_bound": b.upper_bound,
                "err_est": b.err_est,
                "method": b.method,
            });
            render(object(rec), &rate_note(&spec), format)
        }
        Command::Correct { sample, family } => {
            let strategy = Registry::builtin().get(family).ok_or_else(|| Error::InvalidSpec {
                input: family.clone(),
                reason: format!("unknown family; expected one of {:?}", Registry::builtin().names()),
            })?;
            let x = read_sample(sample)?;
            let c = correct_hoover(&x, strategy, &qcfg, &scfg)?;
            let rec = json!({
                "family": strategy.name(),
                "n": x.len(),
                "raw": c.raw,
                "bias_estimate": c.bias_estimate,
                "corrected": c.corrected,
                "fitted": c.fit.spec.to_string(),
                "loglik": c.fit.loglik,
                "fit_iterations": c.fit.iterations,
                "out_of_range": c.out_of_range,
            });
            let notes = if c.out_of_range {
                vec!["corrected value lies outside [0, 1 - 1/n]; reported unclamped".to_string()]
            } else {
                Vec::new()
            };
            render(object(rec), &notes, format)
        }
        Command::Simulate { config } => {
            let text = std::fs::read_to_string(config).map_err(|e| Error::Io(format!("{}: {e}", config.display())))?;
            let cfg: SimulationConfig =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let report = run_grid(&cfg, &qcfg, &scfg)?;
            match format {
                Format::Json => {
                    let mut v = to_value(&report)?;
                    round_json(&mut v);
                    serde_json::to_string_pretty(&v)
                        .map(|s| s + "\n")
                        .map_err(|e| Error::Io(e.to_string()))
                }
                Format::Csv | Format::Plain => {
                    let mut buf = Vec::new();
                    write_csv(&report.cells, &mut buf)?;
                    let mut out = String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))?;
                    for f in &report.errors {
                        out.push_str(&format!(
                            "# cell {} ({}, n={}) failed: {}\n",
                            f.index, f.spec, f.n, f.error
                        ));
                    }
                    Ok(out)
                }
            }
        }
        Command::Oracle { alpha, n, reps, seed } => {
            let mc = min_tilted_oracle(*alpha, *n, *reps, Seed(*seed))?;
            let q = min_term_integral(*alpha, *n, &qcfg)?;
            let rec = json!({
                "alpha": alpha,
                "n": n,
                "reps": mc.draws,
                "seed": seed,
                "mc_mean": mc.mean,
                "mc_std_error": mc.std_error,
                "quadrature": q.value,
                "quadrature_err_est": q.err_est,
                "z_score": (mc.mean - q.value) / mc.std_error,
            });
            render(object(rec), &[], format)
        }
    }
}

/// Error report written to standard error.
pub fn error_json(e: &Error) -> String {
    let v = json!({
        "error": {
            "kind": e.kind(),
            "message": e.to_string(),
            "exit_code": e.exit_code(),
        }
    });
    serde_json::to_string(&v).unwrap_or_else(|_| e.to_string())
}
