//! Experiment harness for the weighted magnetic heat flow: configuration,
//! single runs, sweeps and run records.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod record;
pub mod sweep;

use std::path::{Path, PathBuf};

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use record::{Check, RunRecord};
pub use sweep::{sweep, SweepSpec};

/// Runs one experiment in a fresh directory under `out` and indexes it.
pub fn run_in(cfg: &ExperimentConfig, experiment: Experiment, out: &Path) -> Result<(PathBuf, RunRecord)> {
    let mut dir = output::RunDir::allocate(out, experiment.name())?;
    let record = experiments::run(cfg, experiment, &mut dir)?;
    output::append_index(out, dir.path(), &record)?;
    Ok((dir.path().to_path_buf(), record))
}

/// Worker count from `MAGHEAT_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("MAGHEAT_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}
