use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "thermovqa", version, about = "Variational Gibbs-state preparation for the XY chain")]
pub struct Cli {
    /// Worker threads (0 picks one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize the Gibbs circuit and compare with the exact thermal state.
    Prepare(PrepareArgs),
    /// Run prepare over a grid and write one CSV row per point.
    Sweep(SweepArgs),
    /// Rebuild the thermofield-double circuit from a prepare result.
    Tfd(TfdArgs),
    /// Shot-noise scaling exponents from exact spectra.
    Shots(ShotsArgs),
    /// Gate counts and CNOT depth next to the closed-form formulas.
    Resources(ResourcesArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Statevector,
    Sampled,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectBy {
    #[default]
    FreeEnergy,
    Fidelity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[arg(long)]
    pub n: usize,
    /// Inverse temperature; 0 maximizes the entropy alone.
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    /// Ancilla layers (default n - 1).
    #[arg(long)]
    pub layers_a: Option<usize>,
    /// System layers (default n - 1).
    #[arg(long)]
    pub layers_s: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Statevector)]
    pub mode: Mode,
    /// Shots for the sampled estimate of the selected run.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, value_enum, default_value_t = SelectBy::FreeEnergy)]
    pub select_by: SelectBy,
    /// Directory for per-run convergence traces.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.2, 0.5, 1.0, 2.0, 5.0])]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.1, 0.5, 0.9])]
    pub gamma: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    #[arg(long)]
    pub layers_a: Option<usize>,
    #[arg(long)]
    pub layers_s: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TfdArgs {
    /// JSON written by `prepare`.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShotsArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.1, 0.5, 0.9])]
    pub gamma: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0])]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    pub n_min: usize,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    /// Number of lowest-energy states to fit.
    #[arg(long, default_value_t = thermovqa::shotscale::DEFAULT_STATES)]
    pub k: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub layers_a: Option<usize>,
    #[arg(long)]
    pub layers_s: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
