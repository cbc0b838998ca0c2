use std::fs;

use serde::{Deserialize, Serialize};
use thermovqa::hamiltonian::{build_xy_hamiltonian, gibbs_state_exact, EIGENVECTOR_LIMIT};
use thermovqa::metrics::{trace_distance, uhlmann_fidelity};
use thermovqa::state::partial_trace;
use thermovqa::vqa::{prepare_tfd, GibbsObjective};

use super::RunConfig;
use crate::args::TfdArgs;
use crate::error::{CliError, CliResult};
use crate::output::{render_document, write_output};

#[derive(Deserialize)]
struct PrepareFile {
    config: RunConfig,
    result: PrepareFileResult,
}

#[derive(Deserialize)]
struct PrepareFileResult {
    best: PrepareFileBest,
}

#[derive(Deserialize)]
struct PrepareFileBest {
    theta: Vec<f64>,
    phi: Vec<f64>,
    free_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfdReport {
    /// `F(rho_A, rho_Gibbs)`.
    pub fidelity_a: f64,
    pub fidelity_b: f64,
    /// `F(rho_A, rho_B)`.
    pub mutual_fidelity: f64,
    pub mutual_trace_distance: f64,
    /// Cost of the Gibbs circuit re-simulated at the loaded parameters.
    pub resimulated_free_energy: f64,
    pub recorded_free_energy: f64,
}

/// Loads a prepare result, checking the parameter shapes against its config.
fn load(args: &TfdArgs) -> CliResult<(RunConfig, Vec<f64>, f64)> {
    let text = fs::read_to_string(&args.params).map_err(|e| crate::output::io_context(&args.params, e))?;
    let file: PrepareFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: not a prepare result: {e}", args.params.display())))?;
    let c = &file.config;
    let ansatz = thermovqa::ansatz::GibbsAnsatz::new(c.n, c.layers_a, c.layers_s)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.params.display())))?;
    let best = file.result.best;
    if best.theta.len() != ansatz.theta_len() || best.phi.len() != ansatz.phi_len() {
        return Err(CliError::Input(format!(
            "{}: expected {} theta and {} phi values, found {} and {}",
            args.params.display(),
            ansatz.theta_len(),
            ansatz.phi_len(),
            best.theta.len(),
            best.phi.len()
        )));
    }
    if best.theta.iter().chain(&best.phi).any(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("{}: non-finite parameter", args.params.display())));
    }
    let params = best.theta.into_iter().chain(best.phi).collect();
    Ok((file.config, params, best.free_energy))
}

pub fn tfd_report(config: &RunConfig, params: &[f64], recorded: f64) -> CliResult<TfdReport> {
    let n = config.n;
    if n > EIGENVECTOR_LIMIT {
        return Err(CliError::Capacity(format!("TFD report needs n <= {EIGENVECTOR_LIMIT}, got {n}")));
    }
    let hamiltonian = build_xy_hamiltonian(n, config.gamma, config.h)?;
    let objective = GibbsObjective::for_beta(&hamiltonian, config.beta, config.layers_a, config.layers_s)?;
    let state = prepare_tfd(objective.ansatz(), params)?;
    let a: Vec<usize> = (0..n).collect();
    let b: Vec<usize> = (n..2 * n).collect();
    let rho_a = partial_trace(&state, &a)?;
    let rho_b = partial_trace(&state, &b)?;
    let gibbs = gibbs_state_exact(&hamiltonian, config.beta)?;
    Ok(TfdReport {
        fidelity_a: uhlmann_fidelity(&rho_a, &gibbs)?,
        fidelity_b: uhlmann_fidelity(&rho_b, &gibbs)?,
        mutual_fidelity: uhlmann_fidelity(&rho_a, &rho_b)?,
        mutual_trace_distance: trace_distance(&rho_a, &rho_b)?,
        resimulated_free_energy: objective.cost(params)?,
        recorded_free_energy: recorded,
    })
}

pub fn tfd(args: &TfdArgs) -> CliResult<()> {
    let (config, params, recorded) = load(args)?;
    let report = tfd_report(&config, &params, recorded)?;
    write_output(args.output.as_deref(), &render_document("tfd", &config, &report)?)
}
