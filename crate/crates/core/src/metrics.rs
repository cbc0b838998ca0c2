//! Distances between density matrices.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, EIGEN_CLAMP};
use crate::state::DensityMatrix;
use crate::C64;

/// Eigenvalues below this are treated as outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return invalid(format!("density matrices have sizes {} and {}", rho.dim(), sigma.dim()));
    }
    Ok(())
}

/// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, computed as the squared sum of
/// singular values of `sqrt(rho) sqrt(sigma)`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let product = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    let root_sum: f64 = product.singular_values().iter().sum();
    Ok((root_sum * root_sum).min(1.0))
}

fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(m);
    let mut scaled = vecs.clone();
    for (k, &v) in vals.iter().enumerate() {
        scaled.column_mut(k).scale_mut(v.max(0.0).sqrt());
    }
    scaled * vecs.adjoint()
}

/// `1/2 sum_i |mu_i|` over eigenvalues of `rho - sigma`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|m| m.abs()).sum::<f64>())
}

/// `S(sigma || rho) = Tr sigma ln sigma - Tr sigma ln rho`.
///
/// Returns a domain error when `sigma` has weight outside the support of
/// `rho`, where the value is infinite.
pub fn relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let (rho_vals, rho_vecs) = hermitian_eigen(rho.matrix());
    // Weight of sigma on each eigenvector of rho: <r_k|sigma|r_k>.
    let rotated: DMatrix<C64> = rho_vecs.adjoint() * sigma.matrix() * &rho_vecs;
    let mut cross = 0.0;
    for (k, &r) in rho_vals.iter().enumerate() {
        let w = rotated[(k, k)].re;
        if r <= SUPPORT_CUTOFF {
            if w > SUPPORT_CUTOFF {
                return Err(Error::Domain(format!(
                    "sigma has weight {w:.3e} outside the support of rho; relative entropy is infinite"
                )));
            }
            continue;
        }
        cross += w * r.ln();
    }
    let self_term: f64 =
        sigma.eigenvalues().into_iter().filter(|&s| s > EIGEN_CLAMP).map(|s| s * s.ln()).sum();
    Ok((self_term - cross).max(0.0))
}
