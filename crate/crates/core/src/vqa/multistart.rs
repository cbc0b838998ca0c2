use std::f64::consts::TAU;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bfgs, BfgsOptions, CostBreakdown, GibbsObjective, Termination, TracePoint};
use crate::error::{invalid, Result};
use crate::hamiltonian::{gibbs_state_exact, PauliHamiltonian, EIGENVECTOR_LIMIT};
use crate::metrics::uhlmann_fidelity;
use crate::state::DensityMatrix;

/// How the best run is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    #[default]
    FreeEnergy,
    Fidelity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultistartOptions {
    pub layers_a: usize,
    pub layers_s: usize,
    pub runs: usize,
    pub seed: u64,
    pub bfgs: BfgsOptions,
    pub selector: Selector,
    /// Compare each run with the exact Gibbs state when it is small enough.
    pub reference: bool,
}

impl MultistartOptions {
    /// Ten runs with `l_A = l_S = n - 1`.
    pub fn new(n: usize, seed: u64) -> Self {
        let layers = n.saturating_sub(1);
        Self {
            layers_a: layers,
            layers_s: layers,
            runs: 10,
            seed,
            bfgs: BfgsOptions::default(),
            selector: Selector::FreeEnergy,
            reference: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationRun {
    pub run: usize,
    pub seed: u64,
    pub initial_parameters: Vec<f64>,
    pub final_parameters: Vec<f64>,
    pub initial_cost: f64,
    pub final_cost: CostBreakdown,
    pub iterations: usize,
    pub gradient_evaluations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Uhlmann fidelity with the exact Gibbs state, when computed.
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
}

impl OptimizationRun {
    /// Writes `iteration,cost,gradient_norm` rows.
    pub fn write_trace_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["iteration", "cost", "gradient_norm"])?;
        for t in &self.trace {
            w.write_record([t.iteration.to_string(), format!("{:.16e}", t.cost), format!("{:.16e}", t.gradient_norm)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultistartResult {
    pub runs: Vec<OptimizationRun>,
    /// Run with the lowest final cost.
    pub best_index: usize,
    /// Run with the highest fidelity, when fidelities are available.
    pub best_fidelity_index: Option<usize>,
    /// Index picked by the configured [`Selector`].
    pub selected_index: usize,
    /// Fidelity of the selected run.
    pub best_fidelity: Option<f64>,
}

impl MultistartResult {
    pub fn selected(&self) -> &OptimizationRun {
        &self.runs[self.selected_index]
    }
}

/// RNG for run `run` of a multistart with `seed`: one ChaCha stream per run.
pub fn run_rng(seed: u64, run: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

/// `count` angles uniform on `[0, 2 pi)`.
pub fn random_parameters<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(0.0..TAU)).collect()
}

/// Runs `opts.runs` independent BFGS minimizations of the free energy from
/// random starts. `beta = 0` maximizes the entropy instead.
pub fn multistart_optimize(
    hamiltonian: &PauliHamiltonian,
    beta: f64,
    opts: &MultistartOptions,
) -> Result<MultistartResult> {
    if opts.runs == 0 {
        return invalid("multistart needs at least one run");
    }
    let objective = GibbsObjective::for_beta(hamiltonian, beta, opts.layers_a, opts.layers_s)?;
    let reference: Option<DensityMatrix> = if opts.reference && hamiltonian.n_qubits() <= EIGENVECTOR_LIMIT {
        Some(gibbs_state_exact(hamiltonian, beta)?)
    } else {
        None
    };

    let runs: Vec<OptimizationRun> = (0..opts.runs)
        .into_par_iter()
        .map(|r| single_run(&objective, reference.as_ref(), opts, r))
        .collect::<Result<_>>()?;

    let best_index = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.final_cost.free_energy.total_cmp(&b.1.final_cost.free_energy))
        .map(|(i, _)| i)
        .expect("at least one run");
    let best_fidelity_index = if runs.iter().all(|r| r.fidelity.is_some()) {
        runs.iter()
            .enumerate()
            .max_by(|a, b| a.1.fidelity.unwrap().total_cmp(&b.1.fidelity.unwrap()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
    } else {
        None
    };
    let selected_index = match opts.selector {
        Selector::FreeEnergy => best_index,
        Selector::Fidelity => best_fidelity_index.unwrap_or(best_index),
    };
    let best_fidelity = runs[selected_index].fidelity;
    Ok(MultistartResult { runs, best_index, best_fidelity_index, selected_index, best_fidelity })
}

fn single_run(
    objective: &GibbsObjective,
    reference: Option<&DensityMatrix>,
    opts: &MultistartOptions,
    run: usize,
) -> Result<OptimizationRun> {
    let mut rng = run_rng(opts.seed, run);
    let x0 = random_parameters(&mut rng, objective.parameter_count());
    let result = bfgs(objective, &x0, &opts.bfgs)?;
    let final_cost = objective.evaluate_params(&result.x)?;
    let fidelity = match reference {
        Some(rho) => Some(uhlmann_fidelity(&objective.system_state(&result.x)?, rho)?),
        None => None,
    };
    Ok(OptimizationRun {
        run,
        seed: opts.seed,
        initial_parameters: x0,
        final_parameters: result.x,
        initial_cost: result.initial_cost,
        final_cost,
        iterations: result.iterations,
        gradient_evaluations: result.gradient_evaluations,
        converged: result.converged,
        termination: result.termination,
        fidelity,
        trace: result.trace,
    })
}
