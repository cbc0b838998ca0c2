use crate::error::{invalid, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::state::{kernel, GateMatrix};
use crate::C64;

/// Largest register a dense statevector may span.
pub const MAX_STATE_QUBITS: usize = 30;

/// Normalized pure state of `n` qubits, `2^n` complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0).expect("index 0 always exists")
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_STATE_QUBITS {
            return invalid(format!("{n_qubits} qubits exceeds the {MAX_STATE_QUBITS}-qubit limit"));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return invalid(format!("basis index {index} out of range for {n_qubits} qubits"));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps amplitudes that are already normalized (within 1e-10).
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return invalid(format!("state is not normalized (|psi|^2 = {norm_sqr})"));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Normalizes `amplitudes` and wraps them.
    pub fn from_unnormalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_qubits, amplitudes })
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Computational-basis measurement probabilities `|a_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return invalid("inner product of states with different qubit counts");
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Applies `gate` to `targets` in place. For two-qubit gates `targets[0]`
    /// is the high bit of the gate's local index.
    pub fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        check_targets(self.n_qubits, gate.arity(), targets)?;
        match targets {
            [q] => kernel::apply_1q(&mut self.amplitudes, gate.elements(), *q),
            [hi, lo] => kernel::apply_2q(&mut self.amplitudes, gate.elements(), *hi, *lo),
            _ => unreachable!("arity checked"),
        }
        Ok(())
    }

    /// Consuming form of [`StateVector::apply_gate`].
    pub fn with_gate(mut self, gate: &GateMatrix, targets: &[usize]) -> Result<Self> {
        self.apply_gate(gate, targets)?;
        Ok(self)
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_targets(self.n_qubits, 2, &[control, target])?;
        kernel::apply_cnot(&mut self.amplitudes, control, target);
        Ok(())
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, hamiltonian: &PauliHamiltonian) -> Result<f64> {
        if hamiltonian.n_qubits() != self.n_qubits {
            return invalid(format!(
                "Hamiltonian acts on {} qubits, state has {}",
                hamiltonian.n_qubits(),
                self.n_qubits
            ));
        }
        amplitude_expectation(&self.amplitudes, hamiltonian)
    }

    /// Tensor product `self (x) high`, where `high` occupies the upper qubits.
    pub fn tensor(&self, high: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * high.dim());
        for h in &high.amplitudes {
            for l in &self.amplitudes {
                amps.push(h * l);
            }
        }
        StateVector::from_raw(self.n_qubits + high.n_qubits, amps)
    }
}

/// `<psi|H|psi>` on raw amplitudes whose length matches `H`.
pub(crate) fn amplitude_expectation(amps: &[C64], hamiltonian: &PauliHamiltonian) -> Result<f64> {
    debug_assert_eq!(amps.len(), hamiltonian.dim());
    let value: C64 =
        hamiltonian.terms().iter().map(|t| t.pauli_string().expectation(amps) * t.coefficient()).sum();
    real_part_checked(value, 1.0 + hamiltonian.coefficient_norm())
}

pub(crate) fn real_part_checked(value: C64, scale: f64) -> Result<f64> {
    if value.im.abs() > 1e-10 * scale {
        return Err(crate::Error::Invariant(format!(
            "expectation value has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return invalid(format!("amplitude count {len} is not a power of two >= 2"));
    }
    Ok(len.trailing_zeros() as usize)
}

pub(crate) fn check_targets(n_qubits: usize, arity: usize, targets: &[usize]) -> Result<()> {
    if targets.len() != arity {
        return invalid(format!("gate acts on {arity} qubit(s) but {} target(s) given", targets.len()));
    }
    for (k, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return invalid(format!("target qubit {t} out of range for {n_qubits} qubits"));
        }
        if targets[..k].contains(&t) {
            return invalid(format!("duplicate target qubit {t}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    use super::*;
    use crate::hamiltonian::{build_xy_hamiltonian, Pauli, PauliHamiltonian, PauliTerm};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn cnot_truth_table() {
        // |10>: qubit 1 holds the 1 and is the control.
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_gate(&GateMatrix::cnot(), &[1, 0]).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11).unwrap());
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_cnot(1, 0).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11).unwrap());
        // Control clear: nothing happens.
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_gate(&GateMatrix::cnot(), &[0, 1]).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b10).unwrap());
    }

    #[test]
    fn ry_half_turn_makes_plus() {
        let s = StateVector::zero(1).with_gate(&GateMatrix::ry(FRAC_PI_2), &[0]).unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn rp_at_zero_is_identity() {
        let s = StateVector::from_unnormalized(vec![c(0.1), C64::new(0.3, -0.2), c(0.5), C64::new(0.0, 0.7)])
            .unwrap();
        let t = s.clone().with_gate(&GateMatrix::rp(0.0, 0.0), &[0, 1]).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn bad_targets_rejected() {
        let mut s = StateVector::zero(3);
        assert!(s.apply_gate(&GateMatrix::cnot(), &[1, 1]).is_err());
        assert!(s.apply_gate(&GateMatrix::cnot(), &[0, 3]).is_err());
        assert!(s.apply_gate(&GateMatrix::ry(0.1), &[0, 1]).is_err());
        assert!(s.apply_gate(&GateMatrix::ry(0.1), &[5]).is_err());
    }

    #[test]
    fn two_qubit_kernel_respects_target_order() {
        // CNOT built as a generic matrix vs the swap kernel, on a 3-qubit state.
        let amps: Vec<C64> = (0..8).map(|i| C64::new(i as f64 + 1.0, 0.5 * i as f64)).collect();
        let s = StateVector::from_unnormalized(amps).unwrap();
        for (ctl, tgt) in [(0, 2), (2, 0), (1, 2), (2, 1)] {
            let mut a = s.clone();
            a.apply_gate(&GateMatrix::cnot(), &[ctl, tgt]).unwrap();
            let mut b = s.clone();
            b.apply_cnot(ctl, tgt).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sigma_z_on_zero() {
        let h = PauliHamiltonian::new(1, vec![PauliTerm::new(1.0, [(0, Pauli::Z)])]).unwrap();
        assert_eq!(StateVector::zero(1).expectation(&h).unwrap(), 1.0);
        let xy = build_xy_hamiltonian(3, 0.5, 0.5).unwrap();
        assert!(StateVector::zero(2).expectation(&xy).is_err());
    }
}
