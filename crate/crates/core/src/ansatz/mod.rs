//! Parametrized circuits for Gibbs and thermofield-double preparation.
//!
//! Register layout for the `2n`-qubit circuits: ancilla `A` on qubits
//! `0..n`, system `S` on `n..2n`. Parameters are `theta` (ancilla) followed
//! by `phi` (system).

mod circuit;

use serde::Serialize;

pub use circuit::{Angle, Circuit, Gate, GateCensus, Instruction, Op};

use crate::error::{invalid, Result};
use crate::state::GateMatrix;

/// Neighbouring pairs on a ring of `n` sites in brick-wall order: even pairs,
/// odd pairs, then the closing pair `(n-1, 0)`.
///
/// For `n = 2` the ring degenerates to `(0, 1), (1, 0)`.
pub fn ring_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
    pairs.extend((1..n - 1).step_by(2).map(|i| (i, i + 1)));
    pairs.push((n - 1, 0));
    pairs
}

fn check_width(n: usize) -> Result<()> {
    if n < 2 {
        return invalid(format!("ansatz needs at least 2 qubits, got {n}"));
    }
    Ok(())
}

/// `R_P(phi_i, phi_j)` as a 4x4 matrix.
pub fn rp_matrix(phi_i: f64, phi_j: f64) -> GateMatrix {
    GateMatrix::rp(phi_i, phi_j)
}

/// Two-qubit circuit realizing `R_P(phi_i, phi_j)` up to global phase with
/// 2 CNOT, 6 SX and 10 RZ.
///
/// The gate sits on targets `[1, 0]` so that the circuit's unitary, indexed
/// by basis state, is directly comparable with [`rp_matrix`].
pub fn decompose_rp(phi_i: f64, phi_j: f64) -> Circuit {
    let mut c = Circuit::new(2);
    c.push(Gate::Rp { phi_i: Angle::Fixed(phi_i), phi_j: Angle::Fixed(phi_j) }, &[1, 0])
        .expect("valid two-qubit gate");
    c.decompose()
}

/// `l_A` layers of (RY column, CNOT ring), then a last RY column.
///
/// Slot `layer * n + q` drives the RY on qubit `q`; the final column uses
/// layer index `l_A`. Every gate is real, so the unitary is orthogonal.
pub fn build_ancilla_ansatz(n: usize, layers: usize) -> Result<Circuit> {
    check_width(n)?;
    let mut c = Circuit::new(n);
    let ring = ring_pairs(n);
    for layer in 0..layers {
        for q in 0..n {
            c.push(Gate::Ry { angle: Angle::Slot(layer * n + q) }, &[q])?;
        }
        for &(a, b) in &ring {
            c.push(Gate::Cnot, &[a, b])?;
        }
        c.barrier();
    }
    for q in 0..n {
        c.push(Gate::Ry { angle: Angle::Slot(layers * n + q) }, &[q])?;
    }
    Ok(c)
}

/// `l_S` layers of `R_P` gates over [`ring_pairs`]; each gate takes two
/// consecutive slots `(phi_i, phi_j)`.
pub fn build_system_ansatz(n: usize, layers: usize) -> Result<Circuit> {
    check_width(n)?;
    let mut c = Circuit::new(n);
    let mut slot = 0;
    for _ in 0..layers {
        for (a, b) in ring_pairs(n) {
            c.push(Gate::Rp { phi_i: Angle::Slot(slot), phi_j: Angle::Slot(slot + 1) }, &[a, b])?;
            slot += 2;
        }
        c.barrier();
    }
    Ok(c)
}

/// The ancilla and system sub-circuits for given sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsAnsatz {
    n: usize,
    layers_a: usize,
    layers_s: usize,
    ancilla: Circuit,
    system: Circuit,
}

impl GibbsAnsatz {
    pub fn new(n: usize, layers_a: usize, layers_s: usize) -> Result<Self> {
        Ok(Self {
            n,
            layers_a,
            layers_s,
            ancilla: build_ancilla_ansatz(n, layers_a)?,
            system: build_system_ansatz(n, layers_s)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers_a(&self) -> usize {
        self.layers_a
    }

    pub fn layers_s(&self) -> usize {
        self.layers_s
    }

    pub fn ancilla(&self) -> &Circuit {
        &self.ancilla
    }

    pub fn system(&self) -> &Circuit {
        &self.system
    }

    pub fn theta_len(&self) -> usize {
        self.ancilla.parameter_count()
    }

    pub fn phi_len(&self) -> usize {
        self.system.parameter_count()
    }

    pub fn parameter_count(&self) -> usize {
        self.theta_len() + self.phi_len()
    }

    /// Splits a full parameter vector into `(theta, phi)`.
    pub fn split<'a>(&self, params: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        if params.len() != self.parameter_count() {
            return invalid(format!("expected {} parameters, got {}", self.parameter_count(), params.len()));
        }
        Ok(params.split_at(self.theta_len()))
    }

    /// `U_A` on A, CNOT from each `A_i` to `S_i`, then `U_S` on S.
    pub fn gibbs_circuit(&self) -> Circuit {
        let n = self.n;
        let mut c = Circuit::new(2 * n);
        c.append(&self.ancilla, 0, 0).expect("ancilla fits");
        c.barrier();
        for i in 0..n {
            c.push(Gate::Cnot, &[i, n + i]).expect("valid CNOT");
        }
        c.barrier();
        c.append(&self.system, n, self.theta_len()).expect("system fits");
        c
    }

    /// Like [`GibbsAnsatz::gibbs_circuit`] with `U_S` applied to both registers
    /// using the same `phi` slots.
    pub fn tfd_circuit(&self) -> Circuit {
        let n = self.n;
        let mut c = Circuit::new(2 * n);
        c.append(&self.ancilla, 0, 0).expect("ancilla fits");
        c.barrier();
        for i in 0..n {
            c.push(Gate::Cnot, &[i, n + i]).expect("valid CNOT");
        }
        c.barrier();
        c.append(&self.system, 0, self.theta_len()).expect("system fits");
        c.append(&self.system, n, self.theta_len()).expect("system fits");
        c
    }
}

/// Gibbs-state circuit on `2n` qubits.
pub fn build_gibbs_pqc(n: usize, layers_a: usize, layers_s: usize) -> Result<Circuit> {
    Ok(GibbsAnsatz::new(n, layers_a, layers_s)?.gibbs_circuit())
}

/// Thermofield-double circuit on `2n` qubits.
pub fn build_tfd_circuit(n: usize, layers_a: usize, layers_s: usize) -> Result<Circuit> {
    Ok(GibbsAnsatz::new(n, layers_a, layers_s)?.tfd_circuit())
}

/// Hardware cost of the Gibbs circuit in the `{RZ, SX, CNOT}` basis. Depth
/// counts CNOT layers only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceCount {
    pub parameters: usize,
    pub cnot_gates: usize,
    pub sqrt_x_gates: usize,
    pub circuit_depth: usize,
}

/// The closed forms hold for `n > 2`; at `n = 2` the ring has a repeated pair.
pub fn formulas_apply(n: usize) -> bool {
    n > 2
}

/// Closed-form counts; `None` when [`formulas_apply`] is false.
pub fn resource_formulas(n: usize, layers_a: usize, layers_s: usize) -> Option<ResourceCount> {
    if !formulas_apply(n) {
        return None;
    }
    let p = if n % 2 == 0 { 2 } else { 3 };
    Some(ResourceCount {
        parameters: n * (layers_a + 1) + 2 * n * layers_s,
        cnot_gates: n * layers_a + 2 * n * layers_s + n,
        sqrt_x_gates: 2 * n * (layers_a + 1) + 6 * n * layers_s,
        circuit_depth: p * layers_a + 2 * p * layers_s + 1,
    })
}

/// Counts taken from the built and decomposed circuit.
pub fn measured_resources(n: usize, layers_a: usize, layers_s: usize) -> Result<ResourceCount> {
    let circuit = build_gibbs_pqc(n, layers_a, layers_s)?;
    let native = circuit.decompose();
    let census = native.census();
    Ok(ResourceCount {
        parameters: circuit.parameter_count(),
        cnot_gates: census.cnot,
        sqrt_x_gates: census.sx,
        circuit_depth: native.cnot_depth(),
    })
}

/// Closed-form counts for `n > 2`, measured counts for `n = 2`.
pub fn resource_counts(n: usize, layers_a: usize, layers_s: usize) -> Result<ResourceCount> {
    match resource_formulas(n, layers_a, layers_s) {
        Some(r) => Ok(r),
        None => measured_resources(n, layers_a, layers_s),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use nalgebra::DMatrix;

    use super::*;
    use crate::hamiltonian::parity_operator;
    use crate::linalg::max_abs_diff;
    use crate::state::StateVector;
    use crate::C64;

    /// Largest entry difference after removing the best global phase.
    fn phase_aligned_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        let phase = overlap / overlap.norm();
        max_abs_diff(&a.map(|x| x * phase), b)
    }

    #[test]
    fn ring_orders() {
        assert_eq!(ring_pairs(2), vec![(0, 1), (1, 0)]);
        assert_eq!(ring_pairs(4), vec![(0, 1), (2, 3), (1, 2), (3, 0)]);
        assert_eq!(ring_pairs(5), vec![(0, 1), (2, 3), (1, 2), (3, 4), (4, 0)]);
    }

    #[test]
    fn rp_at_pi_zero() {
        let m = rp_matrix(PI, 0.0).to_dmatrix();
        #[rustfmt::skip]
        let expected = [
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, -1.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
        ];
        let expected = DMatrix::from_row_slice(4, 4, &expected.map(|x| C64::new(x, 0.0)));
        assert!(max_abs_diff(&m, &expected) < 1e-15);
    }

    #[test]
    fn rp_decomposition() {
        for (a, b) in [(0.0, 0.0), (0.3, 0.7), (-2.1, 4.4), (PI, -PI / 3.0)] {
            let c = decompose_rp(a, b);
            let census = c.census();
            assert_eq!((census.cnot, census.sx, census.rz), (2, 6, 10));
            assert_eq!(census.ry + census.rp + census.rxy + census.ryx, 0);
            let u = c.unitary_by_matrices(&[]).unwrap();
            assert!(phase_aligned_diff(&u, &rp_matrix(a, b).to_dmatrix()) < 1e-12);
        }
    }

    #[test]
    fn ry_decomposition_keeps_slots() {
        let mut c = Circuit::new(1);
        c.push(Gate::Ry { angle: Angle::Slot(0) }, &[0]).unwrap();
        let native = c.decompose();
        assert_eq!(native.parameter_count(), 1);
        for t in [0.0, 0.4, -1.9, 3.0] {
            let u = native.unitary_by_matrices(&[t]).unwrap();
            assert!(phase_aligned_diff(&u, &GateMatrix::ry(t).to_dmatrix()) < 1e-12);
        }
    }

    #[test]
    fn kernel_and_matrix_paths_agree() {
        let ansatz = GibbsAnsatz::new(2, 1, 1).unwrap();
        let c = ansatz.gibbs_circuit();
        let params: Vec<f64> = (0..c.parameter_count()).map(|k| 0.37 * k as f64 - 1.1).collect();
        let a = c.unitary(&params).unwrap();
        let b = c.unitary_by_matrices(&params).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-12);
        let native = c.decompose();
        let d = native.unitary(&params).unwrap();
        assert!(phase_aligned_diff(&d, &a) < 1e-10);
    }

    #[test]
    fn builder_counts() {
        let a = build_ancilla_ansatz(4, 3).unwrap();
        assert_eq!(a.parameter_count(), 16);
        assert_eq!(a.census().cnot, 12);
        let s = build_system_ansatz(4, 3).unwrap();
        assert_eq!(s.parameter_count(), 24);
        assert_eq!(s.decompose().census().cnot, 24);
        assert_eq!(build_ancilla_ansatz(3, 0).unwrap().parameter_count(), 3);
        assert!(build_ancilla_ansatz(1, 1).is_err());
        assert!(build_system_ansatz(1, 1).is_err());
        assert!(a.slots_are_dense() && s.slots_are_dense());
    }

    #[test]
    fn zero_angles_do_nothing() {
        let c = build_gibbs_pqc(3, 2, 2).unwrap();
        let out = c.simulate(&vec![0.0; c.parameter_count()]).unwrap();
        assert_eq!(out, StateVector::zero(6));
        let s = build_system_ansatz(3, 2).unwrap();
        let u = s.unitary(&vec![0.0; s.parameter_count()]).unwrap();
        assert!(max_abs_diff(&u, &DMatrix::identity(8, 8)) < 1e-15);
    }

    #[test]
    fn system_ansatz_preserves_parity() {
        let s = build_system_ansatz(4, 2).unwrap();
        let params: Vec<f64> = (0..s.parameter_count()).map(|k| (k as f64 * 1.3).sin() * 3.0).collect();
        let u = s.unitary(&params).unwrap();
        let p = parity_operator(4).unwrap().to_dense().unwrap();
        assert!(max_abs_diff(&(&u * &p * u.adjoint()), &p) < 1e-10);
    }

    #[test]
    fn ancilla_unitary_is_real() {
        let a = build_ancilla_ansatz(3, 2).unwrap();
        let params: Vec<f64> = (0..a.parameter_count()).map(|k| 0.7 * k as f64).collect();
        let u = a.unitary(&params).unwrap();
        assert!(u.iter().all(|x| x.im.abs() <= 1e-12));
    }

    #[test]
    fn spot_resources() {
        let r = ResourceCount { parameters: 40, cnot_gates: 40, sqrt_x_gates: 104, circuit_depth: 19 };
        assert_eq!(resource_counts(4, 3, 3).unwrap(), r);
        assert_eq!(measured_resources(4, 3, 3).unwrap(), r);
        let r5 = resource_counts(5, 4, 4).unwrap();
        assert_eq!((r5.parameters, r5.circuit_depth), (65, 37));
        assert_eq!(measured_resources(5, 4, 4).unwrap(), r5);
        assert_eq!(resource_counts(7, 6, 6).unwrap().parameters, 133);
        let zero = resource_counts(6, 0, 0).unwrap();
        assert_eq!(zero, ResourceCount { parameters: 6, cnot_gates: 6, sqrt_x_gates: 12, circuit_depth: 1 });
        assert!(resource_formulas(2, 1, 1).is_none());
        assert_eq!(resource_counts(2, 1, 1).unwrap().parameters, 8);
    }

    #[test]
    fn json_round_trip() {
        let c = build_gibbs_pqc(2, 1, 1).unwrap();
        let text = c.to_json().unwrap();
        assert_eq!(Circuit::from_json(&text).unwrap(), c);
        assert!(text.contains("\"kind\": \"rp\""));
    }

    #[test]
    fn bad_targets_rejected() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::Cnot, &[0, 0]).is_err());
        assert!(c.push(Gate::Sx, &[2]).is_err());
        assert!(c.push(Gate::Ry { angle: Angle::Slot(0) }, &[0, 1]).is_err());
        assert!(c.push(Gate::Barrier, &[]).is_err());
        assert!(c.push(Gate::Rz { angle: Angle::Fixed(f64::NAN) }, &[0]).is_err());
    }
}
