use std::io::Write;

use nalgebra::DMatrix;

use super::{build_xy_hamiltonian, PauliHamiltonian, DENSE_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, symmetric_eigen, symmetric_eigenvalues};
use crate::state::{DensityMatrix, StateVector};
use crate::C64;

/// Above this many qubits [`exact_spectrum`] skips eigenvectors by default.
pub const EIGENVECTOR_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectrumOptions {
    pub eigenvectors: bool,
    pub dense_limit: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { eigenvectors: true, dense_limit: DENSE_LIMIT }
    }
}

/// Exact eigen-decomposition together with the Boltzmann distribution at `beta`.
///
/// The partition function is kept as `ln Z`: at large `beta` it overflows an
/// `f64` long before the probabilities lose precision.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    energies: Vec<f64>,
    eigenvectors: Option<DMatrix<C64>>,
    ln_partition_function: f64,
    boltzmann_probs: Vec<f64>,
    beta: f64,
}

impl SpectrumResult {
    /// Boltzmann distribution over a given ascending list of energies.
    pub fn from_energies(energies: Vec<f64>, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if energies.is_empty() || energies.iter().any(|e| !e.is_finite()) {
            return invalid("energies must be a nonempty list of finite values");
        }
        if energies.windows(2).any(|w| w[0] > w[1]) {
            return invalid("energies must be sorted ascending");
        }
        let (ln_partition_function, boltzmann_probs) = boltzmann(&energies, beta);
        Ok(Self { energies, eigenvectors: None, ln_partition_function, boltzmann_probs, beta })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvector columns matching [`SpectrumResult::energies`].
    pub fn eigenvectors(&self) -> Option<&DMatrix<C64>> {
        self.eigenvectors.as_ref()
    }

    pub fn boltzmann_probs(&self) -> &[f64] {
        &self.boltzmann_probs
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn ln_partition_function(&self) -> f64 {
        self.ln_partition_function
    }

    /// `Z`; `inf` once `ln Z` exceeds the `f64` range.
    pub fn partition_function(&self) -> f64 {
        self.ln_partition_function.exp()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// `-ln Z / beta`, undefined at `beta = 0`.
    pub fn free_energy(&self) -> Option<f64> {
        (self.beta > 0.0).then(|| -self.ln_partition_function / self.beta)
    }

    /// `sum_i p_i E_i`.
    pub fn mean_energy(&self) -> f64 {
        self.energies.iter().zip(&self.boltzmann_probs).map(|(e, p)| e * p).sum()
    }

    /// Shannon entropy of the Boltzmann weights, in nats.
    pub fn entropy(&self) -> f64 {
        self.boltzmann_probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
    }

    /// Same spectrum at a different temperature.
    pub fn at_beta(&self, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let (ln_partition_function, boltzmann_probs) = boltzmann(&self.energies, beta);
        Ok(Self { ln_partition_function, boltzmann_probs, beta, ..self.clone() })
    }

    /// `sum_i p_i |E_i><E_i|`.
    pub fn gibbs_state(&self) -> Result<DensityMatrix> {
        let vecs = self.require_eigenvectors()?;
        let mut weighted = vecs.clone();
        for (col, &p) in self.boltzmann_probs.iter().enumerate() {
            weighted.column_mut(col).iter_mut().for_each(|x| *x *= p);
        }
        Ok(DensityMatrix::from_matrix_unchecked(&weighted * vecs.adjoint()))
    }

    /// `sum_i sqrt(p_i) |E_i>_A (x) |E_i>_B`, register A on the low qubits.
    ///
    /// Both copies use the same eigenvector, so tracing out either register
    /// leaves exactly the Gibbs state.
    pub fn tfd_state(&self) -> Result<StateVector> {
        let vecs = self.require_eigenvectors()?;
        let d = vecs.nrows();
        let n = d.trailing_zeros() as usize;
        if 2 * n > crate::state::MAX_STATE_QUBITS {
            return Err(Error::Capacity { what: "TFD state", requested: 2 * n, limit: crate::state::MAX_STATE_QUBITS / 2 });
        }
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        for (i, &p) in self.boltzmann_probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let w = p.sqrt();
            let v = vecs.column(i);
            for b in 0..d {
                let vb = v[b] * w;
                if vb == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &mut amps[b * d..(b + 1) * d];
                for (a, slot) in row.iter_mut().enumerate() {
                    *slot += v[a] * vb;
                }
            }
        }
        StateVector::from_unnormalized(amps)
    }

    fn require_eigenvectors(&self) -> Result<&DMatrix<C64>> {
        self.eigenvectors
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("spectrum was computed without eigenvectors".into()))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return invalid(format!("beta must be finite and nonnegative, got {beta}"));
    }
    Ok(())
}

/// `(ln Z, p)` using weights `exp(-beta (E_i - E_0))` relative to the ground energy.
fn boltzmann(energies: &[f64], beta: f64) -> (f64, Vec<f64>) {
    let e0 = energies[0];
    let weights: Vec<f64> = energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let total: f64 = weights.iter().sum();
    let ln_z = -beta * e0 + total.ln();
    (ln_z, weights.into_iter().map(|w| w / total).collect())
}

/// Basis indices grouped by conserved Z-parity, or one group when parity is not conserved.
fn sectors(h: &PauliHamiltonian) -> Vec<Vec<usize>> {
    let d = h.dim();
    if h.preserves_parity() && h.n_qubits() > 1 {
        let (even, odd): (Vec<usize>, Vec<usize>) = (0..d).partition(|b| b.count_ones() % 2 == 0);
        vec![even, odd]
    } else {
        vec![(0..d).collect()]
    }
}

fn local_positions(d: usize, sectors: &[Vec<usize>]) -> Vec<usize> {
    let mut pos = vec![0; d];
    for sector in sectors {
        for (k, &b) in sector.iter().enumerate() {
            pos[b] = k;
        }
    }
    pos
}

fn real_block(h: &PauliHamiltonian, sector: &[usize], pos: &[usize]) -> DMatrix<f64> {
    let m = sector.len();
    let mut block = DMatrix::<f64>::zeros(m, m);
    for t in h.terms() {
        let p = t.pauli_string();
        let flip = p.x_mask() as usize;
        let g = p.global_phase().re * t.coefficient();
        for (k, &b) in sector.iter().enumerate() {
            block[(pos[b ^ flip], k)] += g * p.sign(b);
        }
    }
    block
}

fn complex_block(h: &PauliHamiltonian, sector: &[usize], pos: &[usize]) -> DMatrix<C64> {
    let m = sector.len();
    let mut block = DMatrix::<C64>::zeros(m, m);
    for t in h.terms() {
        let p = t.pauli_string();
        let flip = p.x_mask() as usize;
        let g = p.global_phase() * t.coefficient();
        for (k, &b) in sector.iter().enumerate() {
            block[(pos[b ^ flip], k)] += g * p.sign(b);
        }
    }
    block
}

fn check_dense(h: &PauliHamiltonian, limit: usize) -> Result<()> {
    if h.n_qubits() > limit {
        return Err(Error::Capacity { what: "exact spectrum", requested: h.n_qubits(), limit });
    }
    Ok(())
}

/// Ascending eigenvalues of `H`.
///
/// Parity-conserving Hamiltonians are diagonalized one sector at a time and
/// real ones through the real-symmetric solver.
pub fn exact_energies(h: &PauliHamiltonian) -> Result<Vec<f64>> {
    exact_energies_with_limit(h, DENSE_LIMIT)
}

fn exact_energies_with_limit(h: &PauliHamiltonian, limit: usize) -> Result<Vec<f64>> {
    check_dense(h, limit)?;
    let sectors = sectors(h);
    let pos = local_positions(h.dim(), &sectors);
    let mut energies = Vec::with_capacity(h.dim());
    for sector in &sectors {
        if h.is_real() {
            energies.extend(symmetric_eigenvalues(real_block(h, sector, &pos)));
        } else {
            energies.extend(hermitian_eigenvalues(&complex_block(h, sector, &pos)));
        }
    }
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}

/// Full spectrum and Boltzmann distribution; eigenvectors are included up to
/// [`EIGENVECTOR_LIMIT`] qubits.
pub fn exact_spectrum(h: &PauliHamiltonian, beta: f64) -> Result<SpectrumResult> {
    let opts = SpectrumOptions { eigenvectors: h.n_qubits() <= EIGENVECTOR_LIMIT, ..Default::default() };
    exact_spectrum_with(h, beta, opts)
}

pub fn exact_spectrum_with(h: &PauliHamiltonian, beta: f64, opts: SpectrumOptions) -> Result<SpectrumResult> {
    check_beta(beta)?;
    if !opts.eigenvectors {
        return SpectrumResult::from_energies(exact_energies_with_limit(h, opts.dense_limit)?, beta);
    }
    check_dense(h, opts.dense_limit)?;
    let d = h.dim();
    let sectors = sectors(h);
    let pos = local_positions(d, &sectors);

    // (energy, sector, local column) for every eigenpair.
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d);
    let mut blocks: Vec<DMatrix<C64>> = Vec::with_capacity(sectors.len());
    for (s, sector) in sectors.iter().enumerate() {
        let (vals, vecs) = if h.is_real() {
            let (vals, vecs) = symmetric_eigen(real_block(h, sector, &pos));
            (vals, vecs.map(|x| C64::new(x, 0.0)))
        } else {
            hermitian_eigen(&complex_block(h, sector, &pos))
        };
        pairs.extend(vals.into_iter().enumerate().map(|(k, e)| (e, s, k)));
        blocks.push(vecs);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut eigenvectors = DMatrix::<C64>::zeros(d, d);
    for (col, &(_, s, k)) in pairs.iter().enumerate() {
        for (local, &b) in sectors[s].iter().enumerate() {
            eigenvectors[(b, col)] = blocks[s][(local, k)];
        }
    }
    let energies: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let (ln_partition_function, boltzmann_probs) = boltzmann(&energies, beta);
    Ok(SpectrumResult { energies, eigenvectors: Some(eigenvectors), ln_partition_function, boltzmann_probs, beta })
}

/// `exp(-beta H) / Z` built from the eigen-decomposition.
pub fn gibbs_state_exact(h: &PauliHamiltonian, beta: f64) -> Result<DensityMatrix> {
    exact_spectrum_with(h, beta, SpectrumOptions::default())?.gibbs_state()
}

/// Thermofield double of `H` on `2n` qubits, register A on qubits `0..n`.
pub fn tfd_state(h: &PauliHamiltonian, beta: f64) -> Result<StateVector> {
    exact_spectrum_with(h, beta, SpectrumOptions::default())?.tfd_state()
}

/// The `k` largest Boltzmann probabilities of the XY chain, largest first.
pub fn lowest_k_boltzmann_probs(n: usize, gamma: f64, h: f64, beta: f64, k: usize) -> Result<Vec<f64>> {
    let ham = build_xy_hamiltonian(n, gamma, h)?;
    if n >= usize::BITS as usize || k > 1usize << n {
        return invalid(format!("k = {k} exceeds the 2^{n} available levels"));
    }
    check_beta(beta)?;
    let spectrum = SpectrumResult::from_energies(exact_energies(&ham)?, beta)?;
    Ok(spectrum.boltzmann_probs()[..k].to_vec())
}

/// Writes `index,energy,probability` rows.
pub fn write_spectrum_csv<W: Write>(spectrum: &SpectrumResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "energy", "probability"])?;
    for (i, (e, p)) in spectrum.energies().iter().zip(spectrum.boltzmann_probs()).enumerate() {
        w.write_record([i.to_string(), format!("{e:.16e}"), format!("{p:.16e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_qbm_hamiltonian, parity_operator, Pauli, PauliTerm};
    use crate::linalg::max_abs_diff;
    use crate::state::PartialTrace;

    #[test]
    fn infinite_temperature_is_uniform() {
        let h = build_xy_hamiltonian(3, 0.5, 0.5).unwrap();
        let s = exact_spectrum(&h, 0.0).unwrap();
        assert!((s.partition_function() - 8.0).abs() < 1e-12);
        assert!(s.boltzmann_probs().iter().all(|&p| p == 0.125));
        assert!(s.free_energy().is_none());
    }

    #[test]
    fn two_site_partition_function() {
        let h = build_xy_hamiltonian(2, 1.0, 0.0).unwrap();
        for beta in [0.1, 0.5, 1.0, 2.0] {
            let s = exact_spectrum(&h, beta).unwrap();
            let expected = 2.0 * (2.0 * beta).exp() + 2.0 * (-2.0 * beta).exp();
            assert!((s.partition_function() - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn cold_limit_selects_ground_state() {
        let h = build_xy_hamiltonian(2, 0.5, 0.5).unwrap();
        let s = exact_spectrum(&h, 50.0).unwrap();
        assert!((s.ground_energy() + 2.0).abs() < 1e-12);
        assert!((s.boltzmann_probs()[0] - 1.0).abs() < 1e-8);
        let rho = s.gibbs_state().unwrap();
        let v = s.eigenvectors().unwrap().column(0).into_owned();
        let projector = &v * v.adjoint();
        assert!(max_abs_diff(rho.matrix(), &projector) < 1e-8);
    }

    #[test]
    fn huge_beta_stays_finite() {
        let h = build_xy_hamiltonian(4, 0.5, 0.5).unwrap();
        let s = exact_spectrum(&h, 1e4).unwrap();
        assert!(s.ln_partition_function().is_finite());
        assert!(s.boltzmann_probs().iter().all(|p| p.is_finite()));
        assert!((s.boltzmann_probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.free_energy().unwrap().is_finite());
    }

    #[test]
    fn negative_beta_rejected() {
        let h = build_xy_hamiltonian(2, 0.5, 0.5).unwrap();
        assert!(matches!(exact_spectrum(&h, -1.0), Err(Error::InvalidArgument(_))));
        assert!(exact_spectrum(&h, f64::NAN).is_err());
    }

    #[test]
    fn sectors_match_full_diagonalization() {
        for (n, g, f) in [(3, 0.5, 0.5), (4, 0.2, 1.3), (5, -0.4, 0.1)] {
            let h = build_xy_hamiltonian(n, g, f).unwrap();
            let full = hermitian_eigenvalues(&h.to_dense().unwrap());
            let split = exact_energies(&h).unwrap();
            for (a, b) in full.iter().zip(&split) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenvectors_diagonalize_and_have_parity() {
        let h = build_xy_hamiltonian(4, 0.5, 0.5).unwrap();
        let s = exact_spectrum(&h, 1.0).unwrap();
        let m = h.to_dense().unwrap();
        let v = s.eigenvectors().unwrap();
        let p = parity_operator(4).unwrap().to_dense().unwrap();
        for (i, &e) in s.energies().iter().enumerate() {
            let col = v.column(i).into_owned();
            let hv = &m * &col;
            assert!((hv - &col * C64::new(e, 0.0)).norm() < 1e-10);
            let pv = &p * &col;
            let parity = (col.adjoint() * &pv)[(0, 0)].re;
            assert!((parity.abs() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn complex_hamiltonian_path() {
        // X0 Y1 is imaginary and flips parity, so neither shortcut applies.
        let h = PauliHamiltonian::new(
            2,
            vec![PauliTerm::new(0.7, [(0, Pauli::X), (1, Pauli::Y)]), PauliTerm::new(-0.3, [(1, Pauli::Z)])],
        )
        .unwrap();
        let s = exact_spectrum(&h, 0.8).unwrap();
        let full = hermitian_eigenvalues(&h.to_dense().unwrap());
        for (a, b) in full.iter().zip(s.energies()) {
            assert!((a - b).abs() < 1e-12);
        }
        let rho = s.gibbs_state().unwrap();
        let tfd = s.tfd_state().unwrap();
        for keep in [[0, 1], [2, 3]] {
            let reduced = tfd.partial_trace(&keep).unwrap();
            assert!(max_abs_diff(reduced.matrix(), rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn two_level_tfd_amplitudes() {
        let h = build_qbm_hamiltonian(&[1.0], &[]).unwrap();
        let tfd = tfd_state(&h, 1.0).unwrap();
        let z = 1f64.exp() + (-1f64).exp();
        let expected = [(1f64.exp() / z).sqrt(), 0.0, 0.0, ((-1f64).exp() / z).sqrt()];
        for (a, e) in tfd.amplitudes().iter().zip(expected) {
            assert!((a.norm() - e).abs() < 1e-14);
        }
    }

    #[test]
    fn lowest_k_validation() {
        assert_eq!(lowest_k_boltzmann_probs(3, 0.5, 0.5, 0.0, 4).unwrap(), vec![0.125; 4]);
        assert!(lowest_k_boltzmann_probs(3, 0.5, 0.5, 1.0, 9).is_err());
        let top = lowest_k_boltzmann_probs(2, 0.5, 0.5, 40.0, 1).unwrap();
        assert!((top[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn csv_export() {
        let h = build_xy_hamiltonian(2, 1.0, 0.0).unwrap();
        let s = exact_spectrum(&h, 0.0).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,energy,probability");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,-2.0"));
    }
}
