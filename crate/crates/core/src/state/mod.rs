//! Dense statevector and density-matrix kernel.
//!
//! Basis convention: qubit 0 is the least-significant bit of a basis index and
//! `|0> = (1 0)^T`. Gates act in place on amplitude strides; no `2^n x 2^n`
//! operator is formed when simulating circuits.

mod density;
mod gate;
pub(crate) mod kernel;
mod statevector;

pub use density::{density_from_state, entropy_of_density, partial_trace, DensityMatrix, PartialTrace};
pub use gate::GateMatrix;
pub use statevector::{StateVector, MAX_STATE_QUBITS};
pub(crate) use statevector::amplitude_expectation;

/// Applies `gate` to `targets` of `state`, returning the new state.
pub fn apply_gate(state: StateVector, gate: &GateMatrix, targets: &[usize]) -> crate::Result<StateVector> {
    state.with_gate(gate, targets)
}
