//! Dense Hermitian eigen-decomposition, bridged to `ndarray`.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

/// Eigenvalues in ascending order and the matching eigenvectors as columns.
pub(crate) fn hermitian_eigen(m: &Array2<Complex64>) -> (Vec<f64>, Array2<Complex64>) {
    let n = m.nrows();
    let mat = DMatrix::from_fn(n, n, |i, j| m[[i, j]]);
    let eig = mat.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[[i, col]] = eig.eigenvectors[(i, k)];
        }
    }
    (values, vectors)
}
