//! File and process-level surface: configuration, ingestion, commands and
//! their CSV/JSON outputs.
//!
//! Exit codes: 0 success, 2 configuration error, 3 non-convergence (outputs
//! are still written), 4 fit failure, 1 anything else.

mod commands;
mod config;
mod dataset;
mod output;

pub use commands::{
    cmd_fit, cmd_ingest_check, cmd_simulate, cmd_sweep, summary_histogram_scheme, FitChoice,
    SimulateReport, SweepRow,
};
pub use config::{parse_config, parse_config_str, OutputFormats, RunManifest};
pub use dataset::{ingest_dataset, ColumnSelector, IngestedDataset};
pub use output::{format_float, write_ccdf_csv, write_histogram_csv};

use crate::error::Error;

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    Success,
    /// At least one realization hit `max_steps` before the detector fired.
    NonConvergence,
}

impl Completion {
    pub fn exit_code(self) -> i32 {
        match self {
            Completion::Success => 0,
            Completion::NonConvergence => 3,
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Usage(_) => 2,
        Error::Fit { .. } => 4,
        _ => 1,
    }
}
