//! Thin wrappers over nalgebra's Hermitian eigensolvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::C64;

/// Eigenvalues below this magnitude are treated as numerical zeros when
/// taking square roots or logarithms of PSD spectra.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Ascending eigenvalues with matching eigenvector columns.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    sort_eigenpairs(&eig.eigenvalues, &eig.eigenvectors)
}

/// Real-symmetric variant.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    sort_eigenpairs(&eig.eigenvalues, &eig.eigenvectors)
}

pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

fn sort_eigenpairs<T: nalgebra::Scalar + Copy>(vals: &DVector<f64>, vecs: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

/// `f(M) = V f(Lambda) V^dag` for a Hermitian `M`.
pub fn hermitian_function(m: &DMatrix<C64>, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(m);
    let mut scaled = vecs.clone();
    for (c, &v) in vals.iter().enumerate() {
        let fv = f(v);
        scaled.column_mut(c).iter_mut().for_each(|x| *x *= fv);
    }
    &scaled * vecs.adjoint()
}

/// `max |A - B|` over entries.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
