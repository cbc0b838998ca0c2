use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use super::{CostBreakdown, CostMode, GibbsObjective};
use crate::error::{invalid, Result};
use crate::pauli::PauliString;

/// `-sum_i p_i ln p_i`, skipping zero entries.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return invalid("probabilities must be finite and nonnegative");
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return invalid(format!("probabilities sum to {total}, expected 1"));
    }
    Ok(())
}

/// Multinomial draw of `n_shots` outcomes from `p`, seeded.
pub fn sample_counts(p: &[f64], n_shots: u64, seed: u64) -> Result<Vec<u64>> {
    sample_counts_with(p, n_shots, &mut ChaCha20Rng::seed_from_u64(seed))
}

/// Multinomial draw as a chain of conditional binomials.
pub fn sample_counts_with<R: Rng + ?Sized>(p: &[f64], n_shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    check_distribution(p)?;
    if n_shots == 0 {
        return invalid("n_shots must be at least 1");
    }
    let mut counts = vec![0u64; p.len()];
    let mut remaining = n_shots;
    let mut mass: f64 = p.iter().sum();
    for (i, &pi) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (pi / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = Binomial::new(remaining, q).expect("q in [0, 1]").sample(rng);
        counts[i] = c;
        remaining -= c;
        mass -= pi;
    }
    Ok(counts)
}

/// Plug-in entropy `-sum (c_i/N) ln(c_i/N)`.
pub fn entropy_from_counts(counts: &[u64], n_shots: u64) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if n_shots == 0 || total != n_shots {
        return invalid(format!("counts sum to {total}, expected n_shots = {n_shots} >= 1"));
    }
    let n = n_shots as f64;
    Ok(counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n).map(|f| -f * f.ln()).sum())
}

/// Estimate of `<P>` from `n_shots` single-shot measurements of `P` on `amps`.
pub fn sample_pauli_expectation<R: Rng + ?Sized>(
    amps: &[crate::C64],
    pauli: PauliString,
    n_shots: u64,
    rng: &mut R,
) -> Result<f64> {
    if n_shots == 0 {
        return invalid("n_shots must be at least 1");
    }
    let exact = pauli.expectation(amps).re.clamp(-1.0, 1.0);
    let plus = Binomial::new(n_shots, 0.5 * (1.0 + exact)).expect("probability in [0, 1]").sample(rng);
    Ok(2.0 * plus as f64 / n_shots as f64 - 1.0)
}

/// Cost with shot noise: the ancilla distribution and every Hamiltonian term
/// are each estimated from `n_shots` measurements.
pub fn estimate_cost_sampled(
    objective: &GibbsObjective,
    params: &[f64],
    n_shots: u64,
    seed: u64,
) -> Result<CostBreakdown> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (theta, _) = objective.ansatz().split(params)?;
    let p = objective.ancilla_probabilities(theta)?;
    let counts = sample_counts_with(&p, n_shots, &mut rng)?;
    let entropy = entropy_from_counts(&counts, n_shots)?;
    let state = objective.output_state(params)?;
    let n = objective.ansatz().n();
    let mut energy = 0.0;
    for term in objective.hamiltonian().terms() {
        let pauli = term.pauli_string().shifted(n);
        energy += term.coefficient() * sample_pauli_expectation(state.amplitudes(), pauli, n_shots, &mut rng)?;
    }
    let free_energy = match objective.mode() {
        CostMode::FreeEnergy { beta } => energy - entropy / beta,
        CostMode::EntropyOnly => -entropy,
    };
    let probabilities = counts.iter().map(|&c| c as f64 / n_shots as f64).collect();
    Ok(CostBreakdown { free_energy, energy_term: energy, entropy_term: entropy, probabilities })
}
