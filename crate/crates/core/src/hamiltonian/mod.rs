//! Pauli-sum Hamiltonians and exact thermal references.
//!
//! Units: `k_B = 1`, so `beta` is measured in inverse energy units.

mod spectrum;

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
pub use crate::pauli::{Pauli, PauliString};
use crate::C64;

pub use spectrum::{
    exact_energies, exact_spectrum, exact_spectrum_with, gibbs_state_exact, lowest_k_boltzmann_probs, tfd_state,
    write_spectrum_csv, SpectrumOptions, SpectrumResult, EIGENVECTOR_LIMIT,
};

/// Default ceiling on qubit count for anything that materializes `2^n x 2^n`
/// matrices.
pub const DENSE_LIMIT: usize = 14;

pub(crate) fn check_dense_qubits(what: &'static str, n_qubits: usize) -> Result<()> {
    if n_qubits > DENSE_LIMIT {
        return Err(Error::Capacity { what, requested: n_qubits, limit: DENSE_LIMIT });
    }
    Ok(())
}

/// Weighted Pauli string.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    paulis: BTreeMap<usize, Pauli>,
    string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, paulis: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let paulis: BTreeMap<usize, Pauli> = paulis.into_iter().collect();
        let string = paulis.iter().fold(PauliString::IDENTITY, |s, (&q, &p)| s.with(q, p));
        Self { coefficient, paulis, string }
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn paulis(&self) -> &BTreeMap<usize, Pauli> {
        &self.paulis
    }

    pub fn pauli_string(&self) -> PauliString {
        self.string
    }
}

/// `H = sum_k c_k P_k` with real `c_k`; Hermitian by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 64 {
            return invalid(format!("Hamiltonian must act on 1..=64 qubits, got {n_qubits}"));
        }
        for t in &terms {
            if !t.coefficient.is_finite() {
                return invalid("Pauli term coefficient must be finite");
            }
            if let Some((&q, _)) = t.paulis.iter().next_back() {
                if q >= n_qubits {
                    return invalid(format!("Pauli term touches qubit {q} of a {n_qubits}-qubit system"));
                }
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// `sum_k |c_k|`, an upper bound on the spectral radius.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Real matrix in the computational basis (every term has an even number of Y).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.string.is_real())
    }

    /// Commutes with `prod_i Z_i`.
    pub fn preserves_parity(&self) -> bool {
        self.terms.iter().all(|t| t.string.preserves_parity())
    }

    /// The same operator acting on qubits `offset..offset + n` of a larger register.
    pub fn embedded(&self, total_qubits: usize, offset: usize) -> Result<Self> {
        if offset + self.n_qubits > total_qubits {
            return invalid("embedding does not fit in the target register");
        }
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm::new(t.coefficient, t.paulis.iter().map(|(&q, &p)| (q + offset, p))))
            .collect();
        Self::new(total_qubits, terms)
    }

    /// `out += H |src>`.
    pub fn apply_add(&self, src: &[C64], out: &mut [C64]) {
        for t in &self.terms {
            t.string.apply_add(C64::new(t.coefficient, 0.0), src, out);
        }
    }

    /// Dense matrix, refusing more than [`DENSE_LIMIT`] qubits.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        self.to_dense_with_limit(DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, limit: usize) -> Result<DMatrix<C64>> {
        if self.n_qubits > limit {
            return Err(Error::Capacity { what: "dense Hamiltonian", requested: self.n_qubits, limit });
        }
        let d = self.dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for t in &self.terms {
            let flip = t.string.x_mask() as usize;
            let g = t.string.global_phase() * t.coefficient;
            for b in 0..d {
                m[(b ^ flip, b)] += g * t.string.sign(b);
            }
        }
        Ok(m)
    }
}

/// Periodic XY chain
///
/// ```text
/// H = - sum_i [ (1+gamma)/2 X_i X_{i+1} + (1-gamma)/2 Y_i Y_{i+1} ] - h sum_i Z_i
/// ```
///
/// with `i + 1` taken mod `n`. The sum runs literally over `i = 0..n-1`, so at
/// `n = 2` the single bond appears twice and the couplings double.
pub fn build_xy_hamiltonian(n: usize, gamma: f64, h: f64) -> Result<PauliHamiltonian> {
    if n < 2 {
        return invalid(format!("XY chain needs at least 2 sites, got {n}"));
    }
    if !(gamma.is_finite() && h.is_finite()) {
        return invalid("gamma and h must be finite");
    }
    let jx = -(1.0 + gamma) / 2.0;
    let jy = -(1.0 - gamma) / 2.0;
    let mut terms = Vec::with_capacity(3 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        terms.push(PauliTerm::new(jx, [(i, Pauli::X), (j, Pauli::X)]));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        terms.push(PauliTerm::new(jy, [(i, Pauli::Y), (j, Pauli::Y)]));
    }
    for i in 0..n {
        terms.push(PauliTerm::new(-h, [(i, Pauli::Z)]));
    }
    PauliHamiltonian::new(n, terms)
}

/// Quantum Boltzmann machine Hamiltonian
/// `H = - sum_i b_i Z_i - sum_{(i,j)} w_ij Z_i Z_j`.
///
/// One qubit per bias entry; `weights` lists `(i, j, w_ij)` edges.
pub fn build_qbm_hamiltonian(biases: &[f64], weights: &[(usize, usize, f64)]) -> Result<PauliHamiltonian> {
    let n = biases.len();
    let mut terms = Vec::with_capacity(n + weights.len());
    for (i, &b) in biases.iter().enumerate() {
        terms.push(PauliTerm::new(-b, [(i, Pauli::Z)]));
    }
    for &(i, j, w) in weights {
        if i == j {
            return invalid(format!("self-loop edge ({i}, {i}) in Boltzmann machine graph"));
        }
        if i >= n || j >= n {
            return invalid(format!("edge ({i}, {j}) references a node outside 0..{n}"));
        }
        terms.push(PauliTerm::new(-w, [(i, Pauli::Z), (j, Pauli::Z)]));
    }
    PauliHamiltonian::new(n, terms)
}

/// Dense matrix of `H`.
pub fn to_dense(hamiltonian: &PauliHamiltonian) -> Result<DMatrix<C64>> {
    hamiltonian.to_dense()
}

/// `prod_i Z_i` on `n` qubits.
pub fn parity_operator(n: usize) -> Result<PauliHamiltonian> {
    PauliHamiltonian::new(n, vec![PauliTerm::new(1.0, (0..n).map(|q| (q, Pauli::Z)))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, max_abs_diff};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn count(h: &PauliHamiltonian, pattern: &[Pauli], coefficient: f64) -> usize {
        h.terms()
            .iter()
            .filter(|t| {
                t.paulis().values().copied().collect::<Vec<_>>() == pattern && (t.coefficient() - coefficient).abs() < 1e-15
            })
            .count()
    }

    #[test]
    fn xy_coefficients() {
        let h = build_xy_hamiltonian(3, 0.5, 0.5).unwrap();
        assert_eq!(h.terms().len(), 9);
        assert_eq!(count(&h, &[Pauli::X, Pauli::X], -0.75), 3);
        assert_eq!(count(&h, &[Pauli::Y, Pauli::Y], -0.25), 3);
        assert_eq!(count(&h, &[Pauli::Z], -0.5), 3);

        let iso = build_xy_hamiltonian(4, 0.0, 1.0).unwrap();
        assert_eq!(count(&iso, &[Pauli::X, Pauli::X], -0.5), 4);
        assert_eq!(count(&iso, &[Pauli::Y, Pauli::Y], -0.5), 4);
    }

    #[test]
    fn two_site_chain_doubles_the_bond() {
        let h = build_xy_hamiltonian(2, 1.0, 0.0).unwrap().to_dense().unwrap();
        // -2 X (x) X: anti-diagonal of -2.
        let mut expected = DMatrix::<C64>::zeros(4, 4);
        for i in 0..4 {
            expected[(i, 3 - i)] = c(-2.0);
        }
        assert!(max_abs_diff(&h, &expected) < 1e-15);
        let vals = hermitian_eigenvalues(&h);
        for (v, e) in vals.iter().zip([-2.0, -2.0, 2.0, 2.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn xy_rejects_short_chain() {
        assert!(build_xy_hamiltonian(1, 0.5, 0.5).is_err());
    }

    #[test]
    fn dense_small_cases() {
        let z = PauliHamiltonian::new(1, vec![PauliTerm::new(1.0, [(0, Pauli::Z)])]).unwrap();
        let m = z.to_dense().unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]));
        let xx = PauliHamiltonian::new(2, vec![PauliTerm::new(1.0, [(0, Pauli::X), (1, Pauli::X)])]).unwrap();
        let m = xx.to_dense().unwrap();
        for r in 0..4 {
            for col in 0..4 {
                assert_eq!(m[(r, col)], c(if r + col == 3 { 1.0 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn dense_limit_is_enforced() {
        let h = build_xy_hamiltonian(4, 0.5, 0.5).unwrap();
        match h.to_dense_with_limit(3) {
            Err(Error::Capacity { limit: 3, requested: 4, .. }) => {}
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn qbm_family() {
        let single = build_qbm_hamiltonian(&[1.0], &[]).unwrap().to_dense().unwrap();
        assert_eq!(single, DMatrix::from_row_slice(2, 2, &[c(-1.0), c(0.0), c(0.0), c(1.0)]));

        let pair = build_qbm_hamiltonian(&[0.0, 0.0], &[(0, 1, 1.0)]).unwrap().to_dense().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| pair[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.0, 1.0, 1.0, -1.0]);

        let local = build_qbm_hamiltonian(&[0.3, -0.2, 0.1], &[]).unwrap();
        assert!(local.terms().iter().all(|t| t.paulis().len() == 1));

        assert!(build_qbm_hamiltonian(&[0.0, 0.0], &[(1, 1, 0.5)]).is_err());
        assert!(build_qbm_hamiltonian(&[0.0, 0.0], &[(0, 2, 0.5)]).is_err());
    }

    #[test]
    fn xy_is_real_and_parity_preserving() {
        let h = build_xy_hamiltonian(5, 0.3, 0.5).unwrap();
        assert!(h.is_real());
        assert!(h.preserves_parity());
        let p = parity_operator(5).unwrap().to_dense().unwrap();
        let m = h.to_dense().unwrap();
        assert!(max_abs_diff(&(&m * &p), &(&p * &m)) < 1e-14);
    }
}
