//! Free-energy objective, optimizers and shot sampling.
//!
//! The circuit output on the system register is
//! `rho_S = sum_i p_i U_S |i><i| U_S^dag` with `p_i = |<i|U_A|0>|^2`, so the
//! cost splits into an energy `Tr(H rho_S)` that needs the full simulation and
//! an entropy `-sum_i p_i ln p_i` that only needs the ancilla amplitudes.

mod bfgs;
mod multistart;
mod sampling;

use serde::Serialize;

use crate::ansatz::{Circuit, GibbsAnsatz, Op};
use crate::error::{invalid, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::state::{amplitude_expectation, partial_trace, DensityMatrix, StateVector};
use crate::C64;

pub use bfgs::{bfgs, bfgs_minimize, BfgsOptions, BfgsResult, FnObjective, Objective, Termination, TracePoint};
pub use multistart::{
    multistart_optimize, random_parameters, run_rng, MultistartOptions, MultistartResult, OptimizationRun, Selector,
};
pub use sampling::{
    entropy_from_counts, estimate_cost_sampled, sample_counts, sample_pauli_expectation, shannon_entropy,
};

/// Central-difference step used by [`gradient`].
pub const FD_STEP: f64 = 1e-6;

/// What the optimizer minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CostMode {
    /// `Tr(H rho_S) - S / beta`.
    FreeEnergy { beta: f64 },
    /// `-S`: the infinite-temperature limit, where the energy drops out.
    EntropyOnly,
}

/// One evaluation of the cost and its parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostBreakdown {
    /// The minimized value: free energy, or `-S` in entropy-only mode.
    pub free_energy: f64,
    pub energy_term: f64,
    /// Entropy in nats.
    pub entropy_term: f64,
    pub probabilities: Vec<f64>,
}

/// Free-energy cost of the Gibbs circuit for a fixed Hamiltonian.
#[derive(Clone, Debug)]
pub struct GibbsObjective {
    ansatz: GibbsAnsatz,
    hamiltonian: PauliHamiltonian,
    system_hamiltonian: PauliHamiltonian,
    mode: CostMode,
}

impl GibbsObjective {
    /// `beta > 0`.
    pub fn new(hamiltonian: &PauliHamiltonian, beta: f64, layers_a: usize, layers_s: usize) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return invalid(format!("free-energy cost needs a finite beta > 0, got {beta}"));
        }
        Self::with_mode(hamiltonian, CostMode::FreeEnergy { beta }, layers_a, layers_s)
    }

    /// `beta > 0` uses the free energy; `beta = 0` maximizes the entropy.
    pub fn for_beta(hamiltonian: &PauliHamiltonian, beta: f64, layers_a: usize, layers_s: usize) -> Result<Self> {
        if beta == 0.0 {
            Self::with_mode(hamiltonian, CostMode::EntropyOnly, layers_a, layers_s)
        } else {
            Self::new(hamiltonian, beta, layers_a, layers_s)
        }
    }

    pub fn with_mode(hamiltonian: &PauliHamiltonian, mode: CostMode, layers_a: usize, layers_s: usize) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        if 2 * n > crate::state::MAX_STATE_QUBITS {
            return Err(crate::Error::Capacity {
                what: "Gibbs circuit",
                requested: 2 * n,
                limit: crate::state::MAX_STATE_QUBITS,
            });
        }
        let ansatz = GibbsAnsatz::new(n, layers_a, layers_s)?;
        Ok(Self {
            ansatz,
            hamiltonian: hamiltonian.clone(),
            system_hamiltonian: hamiltonian.embedded(2 * n, n)?,
            mode,
        })
    }

    pub fn ansatz(&self) -> &GibbsAnsatz {
        &self.ansatz
    }

    pub fn hamiltonian(&self) -> &PauliHamiltonian {
        &self.hamiltonian
    }

    pub fn mode(&self) -> CostMode {
        self.mode
    }

    pub fn parameter_count(&self) -> usize {
        self.ansatz.parameter_count()
    }

    /// `p_i = |<i|U_A(theta)|0>|^2`.
    pub fn ancilla_probabilities(&self, theta: &[f64]) -> Result<Vec<f64>> {
        ancilla_probabilities(self.ansatz.ancilla(), theta)
    }

    pub fn evaluate(&self, theta: &[f64], phi: &[f64]) -> Result<CostBreakdown> {
        let fwd = self.forward(theta, phi)?;
        Ok(self.breakdown(fwd.energy, fwd.u.iter().map(|a| a.norm_sqr()).collect()))
    }

    /// [`GibbsObjective::evaluate`] on a concatenated `(theta, phi)` vector.
    pub fn evaluate_params(&self, params: &[f64]) -> Result<CostBreakdown> {
        let (theta, phi) = self.ansatz.split(params)?;
        self.evaluate(theta, phi)
    }

    pub fn cost(&self, params: &[f64]) -> Result<f64> {
        Ok(self.evaluate_params(params)?.free_energy)
    }

    /// Central differences with step `h`.
    pub fn gradient_fd(&self, params: &[f64], h: f64) -> Result<Vec<f64>> {
        let mut x = params.to_vec();
        let mut g = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            let x0 = x[k];
            x[k] = x0 + h;
            let fp = self.cost(&x)?;
            x[k] = x0 - h;
            let fm = self.cost(&x)?;
            x[k] = x0;
            g.push((fp - fm) / (2.0 * h));
        }
        Ok(g)
    }

    /// Cost and exact gradient by one forward and one reverse sweep.
    pub fn value_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (theta, phi) = self.ansatz.split(params)?;
        let Forward { u, mut psi, energy, ancilla_ops, system_ops } = self.forward(theta, phi)?;
        let n = self.ansatz.n();
        let d = 1usize << n;
        let probs: Vec<f64> = u.iter().map(|a| a.norm_sqr()).collect();
        let value = self.breakdown(energy, probs.clone()).free_energy;
        let mut grad = vec![0.0; params.len()];
        let theta_len = theta.len();

        // Cotangent of the output state, then pulled back through U_S.
        let mut lambda = vec![C64::new(0.0, 0.0); psi.len()];
        let energy_scale = match self.mode {
            CostMode::FreeEnergy { .. } => {
                self.system_hamiltonian.apply_add(&psi, &mut lambda);
                backprop(&system_ops, &mut psi, &mut lambda, &mut grad[theta_len..]);
                true
            }
            CostMode::EntropyOnly => false,
        };

        // Pull back onto the ancilla amplitudes u_j, which sit at index j + (j << n).
        let entropy_weight = match self.mode {
            CostMode::FreeEnergy { beta } => 1.0 / beta,
            CostMode::EntropyOnly => 1.0,
        };
        let mut cot: Vec<C64> = (0..d)
            .map(|j| {
                let mut c = if energy_scale { lambda[j | (j << n)] } else { C64::new(0.0, 0.0) };
                if probs[j] > 0.0 {
                    c += u[j] * ((probs[j].ln() + 1.0) * entropy_weight);
                }
                c
            })
            .collect();
        let mut u = u;
        backprop(&ancilla_ops, &mut u, &mut cot, &mut grad[..theta_len]);
        Ok((value, grad))
    }

    /// Full `2n`-qubit output state of the Gibbs circuit.
    pub fn output_state(&self, params: &[f64]) -> Result<StateVector> {
        let (theta, phi) = self.ansatz.split(params)?;
        let fwd = self.forward(theta, phi)?;
        Ok(StateVector::from_raw(2 * self.ansatz.n(), fwd.psi))
    }

    /// Prepared system state `rho_S`.
    pub fn system_state(&self, params: &[f64]) -> Result<DensityMatrix> {
        let n = self.ansatz.n();
        let keep: Vec<usize> = (n..2 * n).collect();
        partial_trace(&self.output_state(params)?, &keep)
    }

    fn breakdown(&self, energy: f64, probabilities: Vec<f64>) -> CostBreakdown {
        let entropy = shannon_entropy(&probabilities);
        let free_energy = match self.mode {
            CostMode::FreeEnergy { beta } => energy - entropy / beta,
            CostMode::EntropyOnly => -entropy,
        };
        CostBreakdown { free_energy, energy_term: energy, entropy_term: entropy, probabilities }
    }

    fn forward(&self, theta: &[f64], phi: &[f64]) -> Result<Forward> {
        let n = self.ansatz.n();
        let ancilla_ops = self.ansatz.ancilla().bind(theta, 0)?;
        let system_ops = self.ansatz.system().bind(phi, n)?;
        let d = 1usize << n;
        let mut u = vec![C64::new(0.0, 0.0); d];
        u[0] = C64::new(1.0, 0.0);
        for op in &ancilla_ops {
            op.apply(&mut u);
        }
        // CNOT_AS copies the ancilla basis label onto the system register.
        let mut psi = vec![C64::new(0.0, 0.0); d * d];
        for (j, &a) in u.iter().enumerate() {
            psi[j | (j << n)] = a;
        }
        for op in &system_ops {
            op.apply(&mut psi);
        }
        let energy = amplitude_expectation(&psi, &self.system_hamiltonian)?;
        Ok(Forward { u, psi, energy, ancilla_ops, system_ops })
    }
}

struct Forward {
    u: Vec<C64>,
    psi: Vec<C64>,
    energy: f64,
    ancilla_ops: Vec<Op>,
    system_ops: Vec<Op>,
}

/// Reverse sweep. On entry `psi` is the output state and `lambda` the
/// cotangent `dF/d psi^*`; both are rewound to the circuit input.
fn backprop(ops: &[Op], psi: &mut [C64], lambda: &mut [C64], grad: &mut [f64]) {
    for op in ops.iter().rev() {
        if let Op::Rotation { pauli, grad: Some((slot, da)), .. } = op {
            // d/da exp(-i a P) psi = -i P psi, and dF = 2 Re<lambda|d psi>.
            grad[*slot] += 2.0 * pauli.matrix_element(lambda, psi).im * da;
        }
        op.unapply(psi);
        op.unapply(lambda);
    }
}

/// Ancilla distribution `|<i|U_A(theta)|0>|^2` from simulating `circuit`.
pub fn ancilla_probabilities(circuit: &Circuit, theta: &[f64]) -> Result<Vec<f64>> {
    Ok(circuit.simulate(theta)?.probabilities())
}

/// Free-energy breakdown at `(theta, phi)`; `beta` must be positive.
pub fn evaluate_cost(
    ansatz: &GibbsAnsatz,
    theta: &[f64],
    phi: &[f64],
    hamiltonian: &PauliHamiltonian,
    beta: f64,
) -> Result<CostBreakdown> {
    if hamiltonian.n_qubits() != ansatz.n() {
        return invalid("Hamiltonian and ansatz sizes differ");
    }
    GibbsObjective::new(hamiltonian, beta, ansatz.layers_a(), ansatz.layers_s())?.evaluate(theta, phi)
}

/// Central finite-difference gradient (step [`FD_STEP`]) over `(theta, phi)`.
pub fn gradient(
    ansatz: &GibbsAnsatz,
    theta: &[f64],
    phi: &[f64],
    hamiltonian: &PauliHamiltonian,
    beta: f64,
) -> Result<Vec<f64>> {
    if hamiltonian.n_qubits() != ansatz.n() {
        return invalid("Hamiltonian and ansatz sizes differ");
    }
    let obj = GibbsObjective::new(hamiltonian, beta, ansatz.layers_a(), ansatz.layers_s())?;
    let params: Vec<f64> = theta.iter().chain(phi).copied().collect();
    obj.gradient_fd(&params, FD_STEP)
}

/// Output state of the thermofield-double circuit at `params`.
pub fn prepare_tfd(ansatz: &GibbsAnsatz, params: &[f64]) -> Result<StateVector> {
    ansatz.tfd_circuit().simulate(params)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, LN_2};

    use super::*;
    use crate::hamiltonian::{build_xy_hamiltonian, exact_spectrum};

    fn five_point(obj: &GibbsObjective, x: &[f64], h: f64) -> Vec<f64> {
        let mut x = x.to_vec();
        (0..x.len())
            .map(|k| {
                let x0 = x[k];
                let mut f = |s: f64| {
                    x[k] = x0 + s * h;
                    obj.cost(&x).unwrap()
                };
                let g = (-f(2.0) + 8.0 * f(1.0) - 8.0 * f(-1.0) + f(-2.0)) / (12.0 * h);
                x[k] = x0;
                g
            })
            .collect()
    }

    #[test]
    fn adjoint_and_central_match_stencil() {
        let h = build_xy_hamiltonian(3, 0.5, 0.5).unwrap();
        for beta in [0.3, 2.0] {
            let obj = GibbsObjective::new(&h, beta, 2, 2).unwrap();
            let mut rng = run_rng(11, 0);
            for _ in 0..3 {
                let x = random_parameters(&mut rng, obj.parameter_count());
                let oracle = five_point(&obj, &x, 1e-3);
                let (value, adj) = obj.value_and_gradient(&x).unwrap();
                assert_eq!(value, obj.cost(&x).unwrap());
                let fd = obj.gradient_fd(&x, FD_STEP).unwrap();
                for k in 0..x.len() {
                    assert!((adj[k] - oracle[k]).abs() < 1e-8, "adjoint slot {k}: {} vs {}", adj[k], oracle[k]);
                    assert!((fd[k] - oracle[k]).abs() < 1e-6, "central slot {k}");
                }
            }
        }
    }

    #[test]
    fn entropy_only_gradient() {
        let h = build_xy_hamiltonian(2, 0.5, 0.5).unwrap();
        let obj = GibbsObjective::with_mode(&h, CostMode::EntropyOnly, 1, 1).unwrap();
        let x = random_parameters(&mut run_rng(3, 1), obj.parameter_count());
        let (_, adj) = obj.value_and_gradient(&x).unwrap();
        let oracle = five_point(&obj, &x, 1e-3);
        for (a, b) in adj.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8);
        }
        // phi never reaches the entropy.
        assert!(adj[obj.ansatz().theta_len()..].iter().all(|g| *g == 0.0));
    }

    #[test]
    fn uniform_ancilla_gives_maximal_entropy() {
        let n = 3;
        let h = build_xy_hamiltonian(n, 0.7, 0.5).unwrap();
        let ansatz = GibbsAnsatz::new(n, 2, 2).unwrap();
        let mut theta = vec![0.0; ansatz.theta_len()];
        theta[..n].fill(FRAC_PI_2);
        let phi: Vec<f64> = (0..ansatz.phi_len()).map(|k| 0.3 * k as f64).collect();
        let beta = 1.7;
        let c = evaluate_cost(&ansatz, &theta, &phi, &h, beta).unwrap();
        assert!((c.entropy_term - n as f64 * LN_2).abs() < 1e-12);
        assert!(c.energy_term.abs() < 1e-12);
        assert!((c.free_energy + n as f64 * LN_2 / beta).abs() < 1e-12);
    }

    #[test]
    fn product_state_cost() {
        let h = build_xy_hamiltonian(2, 1.0, 0.5).unwrap();
        let ansatz = GibbsAnsatz::new(2, 1, 1).unwrap();
        let c = evaluate_cost(&ansatz, &vec![0.0; ansatz.theta_len()], &vec![0.0; ansatz.phi_len()], &h, 1.0).unwrap();
        assert_eq!(c.entropy_term, 0.0);
        assert!((c.free_energy + 1.0).abs() < 1e-12);
        assert_eq!(c.probabilities[0], 1.0);
    }

    #[test]
    fn cost_decomposes() {
        let h = build_xy_hamiltonian(3, 0.2, 0.5).unwrap();
        let beta = 0.8;
        let obj = GibbsObjective::new(&h, beta, 2, 2).unwrap();
        let x = random_parameters(&mut run_rng(5, 0), obj.parameter_count());
        let c = obj.evaluate_params(&x).unwrap();
        assert!((c.free_energy + c.entropy_term / beta - c.energy_term).abs() < 1e-12);
        assert!((c.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_ignores_system_angles() {
        let h = build_xy_hamiltonian(3, 0.5, 0.5).unwrap();
        let ansatz = GibbsAnsatz::new(3, 2, 2).unwrap();
        let mut rng = run_rng(9, 0);
        let theta = random_parameters(&mut rng, ansatz.theta_len());
        let reference = evaluate_cost(&ansatz, &theta, &vec![0.0; ansatz.phi_len()], &h, 1.0).unwrap().entropy_term;
        for _ in 0..100 {
            let phi = random_parameters(&mut rng, ansatz.phi_len());
            let s = evaluate_cost(&ansatz, &theta, &phi, &h, 1.0).unwrap().entropy_term;
            assert!((s - reference).abs() <= 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_beta_and_bad_lengths() {
        let h = build_xy_hamiltonian(2, 0.5, 0.5).unwrap();
        let ansatz = GibbsAnsatz::new(2, 1, 1).unwrap();
        assert!(evaluate_cost(&ansatz, &[0.0; 4], &[0.0; 2], &h, 0.0).is_err());
        assert!(evaluate_cost(&ansatz, &[0.0; 3], &[0.0; 2], &h, 1.0).is_err());
        assert!(ancilla_probabilities(ansatz.ancilla(), &[0.0]).is_err());
    }

    #[test]
    fn two_qubit_optimum_reaches_exact_free_energy() {
        let h = build_xy_hamiltonian(2, 0.5, 0.5).unwrap();
        let result = multistart_optimize(&h, 1.0, &MultistartOptions::new(2, 7)).unwrap();
        let exact = exact_spectrum(&h, 1.0).unwrap().free_energy().unwrap();
        let best = result.selected();
        assert!((best.final_cost.free_energy - exact).abs() < 1e-6);
        assert!(best.final_cost.free_energy >= exact - 1e-9);
        assert!(best.fidelity.unwrap() >= 0.99);
        let (_, g) = GibbsObjective::new(&h, 1.0, 1, 1).unwrap().value_and_gradient(&best.final_parameters).unwrap();
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-5);
        for run in &result.runs {
            assert!(run.final_cost.free_energy <= run.initial_cost);
        }
    }

    #[test]
    fn multistart_is_deterministic() {
        let h = build_xy_hamiltonian(2, 0.3, 0.5).unwrap();
        let opts = MultistartOptions { runs: 4, ..MultistartOptions::new(2, 99) };
        let a = multistart_optimize(&h, 2.0, &opts).unwrap();
        let b = multistart_optimize(&h, 2.0, &opts).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.runs[0].initial_parameters, a.runs[1].initial_parameters);
    }
}
