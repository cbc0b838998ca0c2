mod prepare;
mod resources;
mod shots;
mod sweep;
mod tfd;

pub use prepare::{
    prepare, prepare_report, BestRun, ExactReference, PrepareReport, RunConfig, RunRecord, SampledEstimate,
};
pub use resources::{resource_report, resources, ResourceReport};
pub use shots::{shot_rows, shots, warnings};
pub use sweep::{render_sweep_csv, sweep, sweep_rows, SweepRow};
pub use tfd::{tfd, tfd_report, TfdReport};

use crate::error::{CliError, CliResult};

/// `n - 1` unless overridden.
pub(crate) fn default_layers(n: usize, layers: Option<usize>) -> usize {
    layers.unwrap_or(n.saturating_sub(1))
}

pub(crate) fn check_beta(beta: f64) -> CliResult<()> {
    if beta.is_finite() && beta >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--beta must be finite and nonnegative, got {beta}")))
    }
}
