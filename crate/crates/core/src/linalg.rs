//! Small helpers around nalgebra's Hermitian eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// columns are the eigenvectors matching `values`
    pub vectors: DMatrix<Complex64>,
}

pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> HermitianEigen {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    HermitianEigen { values, vectors }
}

pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of the span of `vectors`, dropping
/// directions whose Gram eigenvalue is below `rel_cutoff × max`.
pub fn orthonormal_span(vectors: &DMatrix<Complex64>, rel_cutoff: f64) -> DMatrix<Complex64> {
    if vectors.ncols() == 0 {
        return DMatrix::zeros(vectors.nrows(), 0);
    }
    let gram = vectors.adjoint() * vectors;
    let eig = hermitian_eigen(&gram);
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > rel_cutoff * top && eig.values[i] > 0.0)
        .collect();
    let mut out = DMatrix::zeros(vectors.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let coeffs: DVector<Complex64> =
            eig.vectors.column(i) / Complex64::new(eig.values[i].sqrt(), 0.0);
        out.set_column(k, &(vectors * coeffs));
    }
    out
}
