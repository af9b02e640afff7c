#![allow(dead_code)]

use dglod::solver::SparseOperator;
use nalgebra::{DMatrix, DVector};

pub fn dense(m: &SparseOperator) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.nrows(), m.ncols(), &m.to_dense())
}

pub fn to_sparse(m: &DMatrix<f64>) -> SparseOperator {
    let data: Vec<f64> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)])
        .collect();
    SparseOperator::from_dense(m.nrows(), m.ncols(), &data)
}

/// Orthonormal basis of the kernel of `c` (columns), from a full SVD.
pub fn kernel_basis(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    let mut square = DMatrix::zeros(n.max(c.nrows()), n);
    square.rows_mut(0, c.nrows()).copy_from(c);
    let svd = square.svd(false, true);
    let scale = svd.singular_values.max().max(1.0);
    let vt = svd.v_t.unwrap();
    let kernel: Vec<_> = (0..n)
        .filter(|&k| svd.singular_values[k] <= 1e-10 * scale)
        .map(|k| vt.row(k).transpose())
        .collect();
    DMatrix::from_columns(&kernel)
}

/// `Z (Z^T A Z)^{-1} Z^T rhs`: the solution of `a(x, w) = (rhs, w)` over `w` in ker C.
pub fn kernel_solve(a: &DMatrix<f64>, z: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let reduced = z.transpose() * a * z;
    let y = reduced
        .lu()
        .solve(&(z.transpose() * rhs))
        .expect("reduced system solvable");
    z * y
}
