use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::linalg::{hermitian_eigenvalues, EIGEN_CLAMP};
use crate::state::statevector::real_part_checked;
use crate::state::StateVector;
use crate::C64;

/// Hermitian, positive semidefinite, unit-trace matrix on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    elements: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace (1e-10) and PSD (smallest
    /// eigenvalue >= -1e-10).
    pub fn from_matrix(elements: DMatrix<C64>) -> Result<Self> {
        let dim = elements.nrows();
        if dim != elements.ncols() || dim < 2 || !dim.is_power_of_two() {
            return invalid(format!(
                "density matrix must be square with power-of-two size, got {}x{}",
                elements.nrows(),
                elements.ncols()
            ));
        }
        let herm = crate::linalg::max_abs_diff(&elements, &elements.adjoint());
        if herm > 1e-10 {
            return invalid(format!("matrix is not Hermitian (deviation {herm:.3e})"));
        }
        let tr = elements.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return invalid(format!("trace is {tr}, expected 1"));
        }
        let min = hermitian_eigenvalues(&elements)[0];
        if min < -1e-10 {
            return invalid(format!("matrix is not positive semidefinite (eigenvalue {min:.3e})"));
        }
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, elements })
    }

    pub(crate) fn from_matrix_unchecked(elements: DMatrix<C64>) -> Self {
        let n_qubits = elements.nrows().trailing_zeros() as usize;
        Self { n_qubits, elements }
    }

    /// `|psi><psi|`.
    pub fn from_state(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self { n_qubits: state.n_qubits(), elements: &v * v.adjoint() }
    }

    /// Diagonal state `sum_i p_i |i><i|`.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let total: f64 = probabilities.iter().sum();
        if probabilities.iter().any(|p| *p < 0.0 || !p.is_finite()) || (total - 1.0).abs() > 1e-10 {
            return invalid("diagonal entries must be a probability vector");
        }
        let diag = nalgebra::DVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| C64::new(p, 0.0)),
        );
        Self::from_matrix(DMatrix::from_diagonal(&diag))
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let elements = DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Self { n_qubits, elements }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.elements
    }

    pub fn trace(&self) -> f64 {
        self.elements.trace().re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.elements.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.elements)
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.elements[(i, i)].re).collect()
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        entropy_of_density(self)
    }

    /// `Tr(H rho)`.
    pub fn expectation(&self, hamiltonian: &PauliHamiltonian) -> Result<f64> {
        if hamiltonian.n_qubits() != self.n_qubits {
            return invalid(format!(
                "Hamiltonian acts on {} qubits, density matrix has {}",
                hamiltonian.n_qubits(),
                self.n_qubits
            ));
        }
        // Tr(P rho) = sum_b <b ^ x| ... : P|b> = phase(b)|b^x>, so Tr = sum_b phase(b) rho[b, b^x].
        let mut value = C64::new(0.0, 0.0);
        for term in hamiltonian.terms() {
            let p = term.pauli_string();
            let flip = p.x_mask() as usize;
            let g = p.global_phase();
            let acc: C64 = (0..self.dim()).map(|b| self.elements[(b, b ^ flip)] * p.sign(b)).sum();
            value += acc * g * term.coefficient();
        }
        real_part_checked(value, 1.0 + hamiltonian.coefficient_norm())
    }

    /// Reduced state on the qubits in `keep` (see [`PartialTrace`]).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = Split::new(self.n_qubits, keep)?;
        let dk = 1usize << split.keep.len();
        let de = 1usize << split.env.len();
        let mut out = DMatrix::<C64>::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for e in 0..de {
                    acc += self.elements[(split.index(a, e), split.index(b, e))];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }
}

/// Reduction to a subset of qubits. `keep[k]` becomes qubit `k` of the result.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        DensityMatrix::partial_trace(self, keep)
    }
}

impl PartialTrace for StateVector {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = Split::new(self.n_qubits(), keep)?;
        let dk = 1usize << split.keep.len();
        let de = 1usize << split.env.len();
        let amps = self.amplitudes();
        // rho = M M^dag with M[k, e] = psi[index(k, e)].
        let m = DMatrix::from_fn(dk, de, |k, e| amps[split.index(k, e)]);
        Ok(DensityMatrix::from_matrix_unchecked(&m * m.adjoint()))
    }
}

/// Free-function form: reduced density matrix of a state or density matrix.
pub fn partial_trace<S: PartialTrace + ?Sized>(state: &S, keep: &[usize]) -> Result<DensityMatrix> {
    state.partial_trace(keep)
}

/// `|psi><psi|` as a density matrix.
pub fn density_from_state(state: &StateVector) -> DensityMatrix {
    DensityMatrix::from_state(state)
}

/// `-sum_i lambda_i ln lambda_i` over eigenvalues, clamping values below
/// 1e-12 to zero.
pub fn entropy_of_density(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > EIGEN_CLAMP)
        .map(|l| -l * l.ln())
        .sum()
}

struct Split {
    keep: Vec<usize>,
    env: Vec<usize>,
}

impl Split {
    fn new(n_qubits: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.len() >= n_qubits {
            return invalid(format!(
                "keep must select a nonempty proper subset of {n_qubits} qubits, got {} qubit(s)",
                keep.len()
            ));
        }
        for (k, &q) in keep.iter().enumerate() {
            if q >= n_qubits || keep[..k].contains(&q) {
                return invalid(format!("invalid or duplicate qubit {q} in keep"));
            }
        }
        let env = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
        Ok(Self { keep: keep.to_vec(), env })
    }

    /// Full basis index from kept-register index `k` and environment index `e`.
    #[inline]
    fn index(&self, k: usize, e: usize) -> usize {
        let mut idx = 0;
        for (bit, &q) in self.keep.iter().enumerate() {
            idx |= ((k >> bit) & 1) << q;
        }
        for (bit, &q) in self.env.iter().enumerate() {
            idx |= ((e >> bit) & 1) << q;
        }
        idx
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn basis_and_plus_densities() {
        let rho = density_from_state(&StateVector::zero(1));
        assert_eq!(rho.diagonal_entries(), vec![1.0, 0.0]);
        let plus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let rho = density_from_state(&plus);
        for x in rho.matrix().iter() {
            assert!((x - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn bell_pair_reduces_to_maximally_mixed() {
        let bell = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap();
        for keep in [[0], [1]] {
            let r = partial_trace(&bell, &keep).unwrap();
            assert!(crate::linalg::max_abs_diff(r.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
        }
    }

    #[test]
    fn product_state_keeps_factor() {
        // |0> on qubit 0, |+> on qubit 1.
        let s = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(0.0), c(FRAC_1_SQRT_2), c(0.0)]).unwrap();
        let r = partial_trace(&s, &[1]).unwrap();
        for x in r.matrix().iter() {
            assert!((x - c(0.5)).norm() < 1e-15);
        }
        // Same answer through the density-matrix path.
        let r2 = density_from_state(&s).partial_trace(&[1]).unwrap();
        assert!(crate::linalg::max_abs_diff(r.matrix(), r2.matrix()) < 1e-15);
    }

    #[test]
    fn selector_validation() {
        let s = StateVector::zero(2);
        assert!(partial_trace(&s, &[]).is_err());
        assert!(partial_trace(&s, &[0, 1]).is_err());
        assert!(partial_trace(&s, &[2]).is_err());
        let s3 = StateVector::zero(3);
        assert!(partial_trace(&s3, &[1, 1]).is_err());
    }

    #[test]
    fn entropy_values() {
        assert!((entropy_of_density(&DensityMatrix::maximally_mixed(2)) - 2.0 * LN_2).abs() < 1e-12);
        assert!(entropy_of_density(&density_from_state(&StateVector::zero(2))).abs() < 1e-12);
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        let expected = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((entropy_of_density(&rho) - expected).abs() < 1e-14);
        assert!((expected - 0.562335).abs() < 1e-6);
    }

    #[test]
    fn from_matrix_validation() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.6), c(0.6), c(0.5)]);
        assert!(DensityMatrix::from_matrix(m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.2), c(0.5)]);
        assert!(DensityMatrix::from_matrix(m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[c(0.6), c(0.0), c(0.0), c(0.6)]);
        assert!(DensityMatrix::from_matrix(m).is_err());
    }
}
