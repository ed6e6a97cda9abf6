//! Hoover (relative mean deviation) index for gamma, Poisson and geometric
//! populations: population values, the sample estimator, its exact
//! finite-sample expectation and bias, ML plug-in bias correction, and a
//! Monte Carlo harness for checking all of it.

pub mod cli_io;
pub mod correction;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod families;
pub mod finite_sample;
pub mod fitting;
pub mod hoover_core;
pub mod mc_harness;
pub mod specnum;

pub use correction::{correct_hoover, CorrectedEstimate};
pub use distributions::{DistributionSpec, Seed};
pub use error::{Error, Result, SampleError};
pub use estimators::{gini_hat, hoover_hat, Sample};
pub use families::{FamilyKind, FamilyStrategy, Population, Registry};
pub use finite_sample::{bias, BiasReport, ExpectationResult};
pub use mc_harness::{run_cell, run_grid, SimulationCell, SimulationConfig};
pub use specnum::{QuadratureConfig, SeriesConfig};
