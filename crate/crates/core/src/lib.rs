//! Variational preparation of Gibbs states on a dense statevector simulator.
//!
//! The circuit has two `n`-qubit registers. An ancilla unitary `U_A` prepares
//! a real amplitude vector whose squared entries are the candidate Boltzmann
//! weights, a column of CNOTs copies that distribution onto the system
//! register as a classical mixture, and a parity-preserving system unitary
//! `U_S` rotates the computational basis toward the Hamiltonian eigenbasis.
//! The free energy `Tr(H rho_S) - S(p) / beta` is minimized with BFGS from a
//! handful of random starts. The entropy comes straight from the ancilla
//! probabilities, so no density-matrix spectrum is needed inside the loop.
//!
//! Modules:
//!
//! * [`state`]: amplitudes, gates, density matrices, partial traces, entropy
//! * [`hamiltonian`]: Pauli-sum Hamiltonians (XY chain, Boltzmann-machine
//!   family), exact spectra, Gibbs and thermofield-double references
//! * [`ansatz`]: circuit IR, the ancilla/system brick walls, native-gate
//!   decomposition and resource accounting
//! * [`vqa`]: cost, gradients, BFGS, multistart and shot sampling
//! * [`metrics`]: fidelity, trace distance, relative entropy
//! * [`shotscale`]: coefficient-of-variation analysis and power-law fits

pub mod ansatz;
mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod metrics;
mod pauli;
pub mod shotscale;
pub mod state;
pub mod vqa;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use pauli::{Pauli, PauliString};

/// Complex amplitude type used throughout.
pub type C64 = nalgebra::Complex<f64>;
