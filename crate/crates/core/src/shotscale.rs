//! Shot-noise analysis of sampled Boltzmann probabilities.
//!
//! Estimating `p_i` from `N_s` computational-basis shots gives a binomial
//! count with relative standard deviation `c_v = sqrt((1 - p_i) / (N_s p_i))`.
//! The product `c_v sqrt(N_s)` depends only on the spectrum and `beta`, and
//! its growth with the system size is summarized by a power law `C n^alpha`.

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{build_xy_hamiltonian, exact_energies};

/// Fits with `r_squared` below this are reported as not power-law shaped.
pub const POWER_LAW_R2_THRESHOLD: f64 = 0.999;

/// Number of lowest states tracked by default.
pub const DEFAULT_STATES: usize = 51;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvRecord {
    pub n: usize,
    pub beta: f64,
    /// Rank in ascending energy order.
    pub state_index: usize,
    pub p_i: f64,
    pub n_shots: u64,
    pub cv: f64,
    /// `c_v sqrt(N_s)`, independent of the shot count.
    pub normalized_cv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub state_index: usize,
    pub alpha: f64,
    pub c: f64,
    pub r_squared: f64,
    pub n_min: usize,
    pub n_max: usize,
}

impl PowerLawFit {
    pub fn is_power_law(&self) -> bool {
        self.r_squared >= POWER_LAW_R2_THRESHOLD
    }
}

/// One row of an [`alpha_sweep`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaRow {
    pub gamma: f64,
    pub beta: f64,
    pub fit: PowerLawFit,
}

/// `sqrt((1 - p) / (N_s p))`.
///
/// ```
/// use thermovqa::shotscale::coefficient_of_variation;
/// assert!((coefficient_of_variation(0.5, 100).unwrap() - 0.1).abs() < 1e-15);
/// assert_eq!(coefficient_of_variation(1.0, 10).unwrap(), 0.0);
/// ```
pub fn coefficient_of_variation(p: f64, n_shots: u64) -> Result<f64> {
    if n_shots == 0 {
        return invalid("n_shots must be at least 1");
    }
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    if p == 0.0 {
        return Err(Error::Domain("coefficient of variation is infinite for p = 0".into()));
    }
    Ok(((1.0 - p) / (n_shots as f64 * p)).sqrt())
}

/// `c_v sqrt(N_s) = sqrt(Z e^{beta E_i} - 1)` for the state of rank `i` in
/// `energies` (ascending), evaluated as `sqrt(sum_{j != i} e^{-beta (E_j - E_i)})`.
/// The sum is accumulated in log space so cold excited states do not overflow.
pub fn normalized_cv(energies: &[f64], beta: f64, i: usize) -> Result<f64> {
    Ok((0.5 * ln_normalized_sum(energies, beta, i)?).exp())
}

fn ln_normalized_sum(energies: &[f64], beta: f64, i: usize) -> Result<f64> {
    if !beta.is_finite() || beta < 0.0 {
        return invalid(format!("beta must be finite and nonnegative, got {beta}"));
    }
    if i >= energies.len() {
        return invalid(format!("state index {i} out of range for {} levels", energies.len()));
    }
    if energies.len() < 2 {
        return Ok(f64::NEG_INFINITY);
    }
    let ei = energies[i];
    let exponents = energies.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| -beta * (e - ei));
    let max = exponents.clone().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = exponents.map(|x| (x - max).exp()).sum();
    Ok(max + sum.ln())
}

/// Boltzmann probability of rank `i`, computed against the ground energy.
fn boltzmann_probability(energies: &[f64], beta: f64, i: usize) -> f64 {
    let e0 = energies[0];
    let z: f64 = energies.iter().map(|&e| (-beta * (e - e0)).exp()).sum();
    (-beta * (energies[i] - e0)).exp() / z
}

fn records_from_energies(energies: &[f64], n: usize, beta: f64, k: usize, n_shots: u64) -> Result<Vec<CvRecord>> {
    if k > energies.len() {
        return invalid(format!("k = {k} exceeds the {} levels at n = {n}", energies.len()));
    }
    (0..k)
        .map(|i| {
            let normalized_cv = normalized_cv(energies, beta, i)?;
            Ok(CvRecord {
                n,
                beta,
                state_index: i,
                p_i: boltzmann_probability(energies, beta, i),
                n_shots,
                cv: normalized_cv / (n_shots as f64).sqrt(),
                normalized_cv,
            })
        })
        .collect()
}

fn xy_energies(n: usize, gamma: f64, h: f64) -> Result<Vec<f64>> {
    exact_energies(&build_xy_hamiltonian(n, gamma, h)?)
}

/// Records for the `k` lowest-energy states of the XY chain at every `n` in
/// `n_range`, ordered by `n` then rank.
pub fn normalized_cv_table(
    gamma: f64,
    h: f64,
    beta: f64,
    n_range: RangeInclusive<usize>,
    k: usize,
    n_shots: u64,
) -> Result<Vec<CvRecord>> {
    if n_shots == 0 {
        return invalid("n_shots must be at least 1");
    }
    let mut out = Vec::new();
    for n in n_range {
        out.extend(records_from_energies(&xy_energies(n, gamma, h)?, n, beta, k, n_shots)?);
    }
    Ok(out)
}

/// Ordinary least squares of `ln y` against `ln n`.
///
/// ```
/// use thermovqa::shotscale::fit_power_law;
/// let pts: Vec<(usize, f64)> = (8..=20).map(|n| (n, 3.0 * (n * n) as f64)).collect();
/// let fit = fit_power_law(0, &pts).unwrap();
/// assert!((fit.alpha - 2.0).abs() < 1e-10 && (fit.c - 3.0).abs() < 1e-10);
/// ```
pub fn fit_power_law(state_index: usize, points: &[(usize, f64)]) -> Result<PowerLawFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, y)| {
            if n == 0 || !(y > 0.0) || !y.is_finite() {
                return invalid(format!("power-law fit needs positive data, got ({n}, {y})"));
            }
            Ok(((n as f64).ln(), y.ln()))
        })
        .collect::<Result<_>>()?;
    fit_log_points(state_index, points, &logs)
}

fn fit_log_points(state_index: usize, points: &[(usize, f64)], logs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if logs.len() < 3 {
        return invalid(format!("power-law fit needs at least 3 points, got {}", logs.len()));
    }
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return invalid("power-law fit needs at least two distinct sizes");
    }
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - alpha * p.0).powi(2)).sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let (n_min, n_max) = points
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), &(n, _)| (lo.min(n), hi.max(n)));
    Ok(PowerLawFit { state_index, alpha, c: intercept.exp(), r_squared, n_min, n_max })
}

/// Power-law fits of `c_v sqrt(N_s)` over `n_range` for the `k` lowest states,
/// for every `(gamma, beta)` pair. Rows are ordered by gamma, beta, then rank.
pub fn alpha_sweep(
    gammas: &[f64],
    h: f64,
    betas: &[f64],
    n_range: RangeInclusive<usize>,
    k: usize,
) -> Result<Vec<AlphaRow>> {
    if gammas.is_empty() || betas.is_empty() {
        return invalid("alpha sweep needs at least one gamma and one beta");
    }
    let sizes: Vec<usize> = n_range.collect();
    if sizes.len() < 3 {
        return invalid("alpha sweep needs at least 3 system sizes");
    }
    if let Some(&n) = sizes.first() {
        if k > 1usize.checked_shl(n as u32).unwrap_or(usize::MAX) {
            return invalid(format!("k = {k} exceeds 2^{n}"));
        }
    }
    let mut rows = Vec::with_capacity(gammas.len() * betas.len() * k);
    for &gamma in gammas {
        let spectra: Vec<Vec<f64>> = sizes.par_iter().map(|&n| xy_energies(n, gamma, h)).collect::<Result<_>>()?;
        let per_beta: Vec<Vec<AlphaRow>> = betas
            .par_iter()
            .map(|&beta| {
                (0..k)
                    .map(|i| {
                        let mut points = Vec::with_capacity(sizes.len());
                        let mut logs = Vec::with_capacity(sizes.len());
                        for (&n, energies) in sizes.iter().zip(&spectra) {
                            let ln_y = 0.5 * ln_normalized_sum(energies, beta, i)?;
                            points.push((n, ln_y.exp()));
                            logs.push(((n as f64).ln(), ln_y));
                        }
                        Ok(AlphaRow { gamma, beta, fit: fit_log_points(i, &points, &logs)? })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        rows.extend(per_beta.into_iter().flatten());
    }
    Ok(rows)
}

/// Writes `gamma,beta,i,alpha_i,C,r_squared,n_min,n_max`.
pub fn write_alpha_csv<W: Write>(rows: &[AlphaRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["gamma", "beta", "i", "alpha_i", "C", "r_squared", "n_min", "n_max"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.gamma),
            format!("{:.16e}", r.beta),
            r.fit.state_index.to_string(),
            format!("{:.16e}", r.fit.alpha),
            format!("{:.16e}", r.fit.c),
            format!("{:.16e}", r.fit.r_squared),
            r.fit.n_min.to_string(),
            r.fit.n_max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
