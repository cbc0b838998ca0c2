use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thermovqa::hamiltonian::{build_xy_hamiltonian, exact_spectrum_with, SpectrumOptions, EIGENVECTOR_LIMIT};
use thermovqa::metrics::{relative_entropy, trace_distance, uhlmann_fidelity};
use thermovqa::vqa::{
    estimate_cost_sampled, multistart_optimize, GibbsObjective, MultistartOptions, MultistartResult, Selector,
    Termination,
};

use super::{check_beta, default_layers};
use crate::args::{Mode, PrepareArgs, SelectBy};
use crate::error::{CliError, CliResult};
use crate::output::{io_context, render_document, write_output};

/// Degeneracy window for the ground level.
const GROUND_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub h: f64,
    pub layers_a: usize,
    pub layers_s: usize,
    pub runs: usize,
    pub seed: u64,
    pub mode: Mode,
    pub n_shots: Option<u64>,
    pub select_by: SelectBy,
}

impl RunConfig {
    pub fn from_args(a: &PrepareArgs) -> CliResult<Self> {
        check_beta(a.beta)?;
        if a.runs == 0 {
            return Err(CliError::Usage("--runs must be at least 1".into()));
        }
        match (a.mode, a.shots) {
            (Mode::Sampled, None) => return Err(CliError::Usage("--mode sampled needs --shots".into())),
            (Mode::Sampled, Some(0)) => return Err(CliError::Usage("--shots must be at least 1".into())),
            (Mode::Statevector, Some(_)) => return Err(CliError::Usage("--shots only applies to --mode sampled".into())),
            _ => {}
        }
        Ok(Self {
            n: a.n,
            beta: a.beta,
            gamma: a.gamma,
            h: a.h,
            layers_a: default_layers(a.n, a.layers_a),
            layers_s: default_layers(a.n, a.layers_s),
            runs: a.runs,
            seed: a.seed,
            mode: a.mode,
            n_shots: a.shots,
            select_by: a.select_by,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub initial_cost: f64,
    pub free_energy: f64,
    pub energy_term: f64,
    pub entropy_term: f64,
    pub iterations: usize,
    pub gradient_evaluations: usize,
    pub converged: bool,
    pub termination: Termination,
    pub fidelity: Option<f64>,
    pub initial_parameters: Vec<f64>,
    pub final_parameters: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactReference {
    /// `-ln Z / beta`; absent at `beta = 0`.
    pub free_energy: Option<f64>,
    pub ln_partition_function: f64,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    pub boltzmann_probabilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRun {
    pub run: usize,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// The minimized cost: free energy, or `-S` at `beta = 0`.
    pub free_energy: f64,
    pub energy_term: f64,
    pub entropy_term: f64,
    pub fidelity: Option<f64>,
    pub trace_distance: Option<f64>,
    /// `S(prepared || exact)`; absent when the exact state lacks support.
    pub relative_entropy: Option<f64>,
    /// Weight of the prepared state on the exact ground space.
    pub ground_space_weight: Option<f64>,
    pub ancilla_probabilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledEstimate {
    pub n_shots: u64,
    pub free_energy: f64,
    pub energy_term: f64,
    pub entropy_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepareReport {
    pub exact: ExactReference,
    pub best_index: usize,
    pub selected_index: usize,
    pub best: BestRun,
    pub sampled: Option<SampledEstimate>,
    pub runs: Vec<RunRecord>,
}

/// Runs the multistart optimization and assembles the report.
pub fn prepare_report(config: &RunConfig, trace: bool) -> CliResult<(PrepareReport, MultistartResult)> {
    let hamiltonian = build_xy_hamiltonian(config.n, config.gamma, config.h)?;
    let mut opts = MultistartOptions::new(config.n, config.seed);
    opts.layers_a = config.layers_a;
    opts.layers_s = config.layers_s;
    opts.runs = config.runs;
    opts.bfgs.record_trace = trace;
    opts.selector = match config.select_by {
        SelectBy::FreeEnergy => Selector::FreeEnergy,
        SelectBy::Fidelity => Selector::Fidelity,
    };
    let result = multistart_optimize(&hamiltonian, config.beta, &opts)?;
    let objective = GibbsObjective::for_beta(&hamiltonian, config.beta, config.layers_a, config.layers_s)?;

    let with_vectors = config.n <= EIGENVECTOR_LIMIT;
    let spectrum = exact_spectrum_with(
        &hamiltonian,
        config.beta,
        SpectrumOptions { eigenvectors: with_vectors, ..SpectrumOptions::default() },
    )?;
    let e0 = spectrum.ground_energy();
    let ground_degeneracy = spectrum.energies().iter().take_while(|&&e| e - e0 <= GROUND_TOLERANCE).count();

    let selected = result.selected();
    let (theta, phi) = objective.ansatz().split(&selected.final_parameters)?;
    let mut best = BestRun {
        run: selected.run,
        theta: theta.to_vec(),
        phi: phi.to_vec(),
        free_energy: selected.final_cost.free_energy,
        energy_term: selected.final_cost.energy_term,
        entropy_term: selected.final_cost.entropy_term,
        fidelity: None,
        trace_distance: None,
        relative_entropy: None,
        ground_space_weight: None,
        ancilla_probabilities: selected.final_cost.probabilities.clone(),
    };
    if with_vectors {
        let prepared = objective.system_state(&selected.final_parameters)?;
        let exact = spectrum.gibbs_state()?;
        best.fidelity = Some(uhlmann_fidelity(&prepared, &exact)?);
        best.trace_distance = Some(trace_distance(&prepared, &exact)?);
        best.relative_entropy = relative_entropy(&prepared, &exact).ok();
        let vectors = spectrum.eigenvectors().expect("eigenvectors requested");
        let rho = prepared.matrix();
        let weight: f64 = (0..ground_degeneracy)
            .map(|k| {
                let v = vectors.column(k);
                (v.adjoint() * rho * v)[(0, 0)].re
            })
            .sum();
        best.ground_space_weight = Some(weight);
    }

    let sampled = match (config.mode, config.n_shots) {
        (Mode::Sampled, Some(shots)) => {
            let c = estimate_cost_sampled(&objective, &selected.final_parameters, shots, config.seed)?;
            Some(SampledEstimate {
                n_shots: shots,
                free_energy: c.free_energy,
                energy_term: c.energy_term,
                entropy_term: c.entropy_term,
            })
        }
        _ => None,
    };

    let runs = result
        .runs
        .iter()
        .map(|r| RunRecord {
            run: r.run,
            initial_cost: r.initial_cost,
            free_energy: r.final_cost.free_energy,
            energy_term: r.final_cost.energy_term,
            entropy_term: r.final_cost.entropy_term,
            iterations: r.iterations,
            gradient_evaluations: r.gradient_evaluations,
            converged: r.converged,
            termination: r.termination,
            fidelity: r.fidelity,
            initial_parameters: r.initial_parameters.clone(),
            final_parameters: r.final_parameters.clone(),
        })
        .collect();

    let report = PrepareReport {
        exact: ExactReference {
            free_energy: spectrum.free_energy(),
            ln_partition_function: spectrum.ln_partition_function(),
            ground_energy: e0,
            ground_degeneracy,
            boltzmann_probabilities: spectrum.boltzmann_probs().to_vec(),
        },
        best_index: result.best_index,
        selected_index: result.selected_index,
        best,
        sampled,
        runs,
    };
    check_report(&report)?;
    Ok((report, result))
}

fn check_report(report: &PrepareReport) -> CliResult<()> {
    let total: f64 = report.best.ancilla_probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(CliError::Invariant(format!("ancilla probabilities sum to {total}")));
    }
    if let Some(exact) = report.exact.free_energy {
        if report.best.free_energy < exact - 1e-9 {
            return Err(CliError::Invariant(format!(
                "prepared free energy {} lies below the exact value {exact}",
                report.best.free_energy
            )));
        }
    }
    Ok(())
}

pub fn prepare(args: &PrepareArgs) -> CliResult<()> {
    let config = RunConfig::from_args(args)?;
    let (report, result) = prepare_report(&config, args.trace.is_some())?;
    if let Some(dir) = &args.trace {
        write_traces(dir, &result)?;
    }
    write_output(args.output.as_deref(), &render_document("prepare", &config, &report)?)
}

fn write_traces(dir: &Path, result: &MultistartResult) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| io_context(dir, e))?;
    for run in &result.runs {
        let path = dir.join(format!("run_{:02}.csv", run.run));
        let file = fs::File::create(&path).map_err(|e| io_context(&path, e))?;
        run.write_trace_csv(std::io::BufWriter::new(file))?;
    }
    Ok(())
}
