//! Kinetic wealth exchange models.
//!
//! Agents meet in random pairs and trade like gas molecules exchanging
//! kinetic energy in collisions. This crate provides:
//!
//! - [`kernels`]: the two-agent exchange rules (no saving, uniform saving,
//!   distributed saving, bi-directional);
//! - [`engine`]: the Monte Carlo driver with equilibrium detection and
//!   ensemble averaging over independently seeded realizations;
//! - [`statistics`]: histograms, survival curves, moments, Gini, KS distance;
//! - [`fitting`]: exponential, Gamma, Pareto-tail, log-normal and piecewise
//!   bulk + tail estimators;
//! - [`cli`]: configuration files, dataset ingestion and the `simulate`,
//!   `sweep` and `fit` commands that write CSV/JSON outputs.
//!
//! ```
//! use kwem::engine::{ensemble_run, SimulationConfig};
//! use kwem::fitting::fit_exponential;
//! use kwem::kernels::ModelSpec;
//!
//! let config = SimulationConfig {
//!     n_agents: 100,
//!     total_wealth: 100.0,
//!     realizations: 1,
//!     sample_steps: 20,
//!     ..SimulationConfig::default()
//! };
//! let run = ensemble_run(&config, &ModelSpec::NoSaving).unwrap();
//! let fit = fit_exponential(&run.samples).unwrap();
//! assert!(fit.ks < 0.1);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod engine;
pub mod error;
pub mod fitting;
pub mod kernels;
pub mod statistics;

pub use error::{Error, Result};

/// Version string embedded in every JSON output.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
