//! Experiment runner for the spinwave libraries: named recipes, parameter
//! sweeps, fits and tabular output for external plotting.
//!
//! A run resolves a [`config::RunConfig`], evaluates the experiment (sweep
//! points in parallel, checkpointed under `<out>/checkpoints`), and writes
//! `manifest.json`, `summary.json` and `data/*.csv` from a single thread.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fitting;
pub mod output;
pub mod sweep;

use std::time::Instant;

pub use config::{resolve, Overrides, Params, RunConfig};
pub use error::{CliError, Result};
pub use experiments::Experiment;
pub use output::{Outcome, Table};

use sweep::Runner;

/// Evaluates an experiment without writing anything.
pub fn evaluate(experiment: Experiment, params: &Params, jobs: usize) -> Result<Outcome> {
    experiment.run(params, &Runner::in_memory(jobs)?)
}

/// Evaluates a resolved configuration and writes its artifacts.
pub fn run(config: &RunConfig, jobs: usize) -> Result<Outcome> {
    let start = Instant::now();
    // Checkpoints are keyed on the resolved configuration so a changed config
    // never picks up stale points.
    let fingerprint = serde_json::to_string(&(config.experiment, &config.parameters))?;
    let runner = Runner::new(jobs, Some(config.output.join("checkpoints")), fingerprint)?;
    let outcome = config.experiment.run(&config.parameters, &runner)?;
    output::write_run(config, &outcome, start.elapsed().as_secs_f64())?;
    runner.finish()?;
    Ok(outcome)
}
