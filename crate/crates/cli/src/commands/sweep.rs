use rayon::prelude::*;
use serde::Serialize;
use thermovqa::hamiltonian::{build_xy_hamiltonian, exact_spectrum_with, SpectrumOptions};
use thermovqa::vqa::{multistart_optimize, MultistartOptions};

use super::{check_beta, default_layers};
use crate::args::SweepArgs;
use crate::error::{CliError, CliResult};
use crate::output::{csv_float, write_output};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub h: f64,
    pub best_fidelity: Option<f64>,
    pub best_free_energy: f64,
    pub exact_free_energy: Option<f64>,
    pub iterations: usize,
}

/// Grid points in output order: `n`, then `gamma`, then `beta`.
pub fn sweep_rows(args: &SweepArgs) -> CliResult<Vec<SweepRow>> {
    if args.n.is_empty() || args.beta.is_empty() || args.gamma.is_empty() {
        return Err(CliError::Usage("sweep grid must not be empty".into()));
    }
    for &beta in &args.beta {
        check_beta(beta)?;
    }
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let mut grid = Vec::new();
    for &n in &args.n {
        for &gamma in &args.gamma {
            for &beta in &args.beta {
                grid.push((n, gamma, beta));
            }
        }
    }
    grid.par_iter().map(|&(n, gamma, beta)| sweep_point(args, n, gamma, beta)).collect()
}

fn sweep_point(args: &SweepArgs, n: usize, gamma: f64, beta: f64) -> CliResult<SweepRow> {
    let hamiltonian = build_xy_hamiltonian(n, gamma, args.h)?;
    let mut opts = MultistartOptions::new(n, args.seed);
    opts.layers_a = default_layers(n, args.layers_a);
    opts.layers_s = default_layers(n, args.layers_s);
    opts.runs = args.runs;
    let result = multistart_optimize(&hamiltonian, beta, &opts)?;
    let exact = exact_spectrum_with(&hamiltonian, beta, SpectrumOptions { eigenvectors: false, ..Default::default() })?;
    let best = result.selected();
    Ok(SweepRow {
        n,
        beta,
        gamma,
        h: args.h,
        best_fidelity: best.fidelity,
        best_free_energy: best.final_cost.free_energy,
        exact_free_energy: exact.free_energy(),
        iterations: best.iterations,
    })
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "beta", "gamma", "h", "best_fidelity", "best_free_energy", "exact_free_energy", "iterations"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            csv_float(Some(r.beta)),
            csv_float(Some(r.gamma)),
            csv_float(Some(r.h)),
            csv_float(r.best_fidelity),
            csv_float(Some(r.best_free_energy)),
            csv_float(r.exact_free_energy),
            r.iterations.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let rows = sweep_rows(args)?;
    write_output(args.output.as_deref(), &render_sweep_csv(&rows)?)
}
