use rayon::prelude::*;

use super::correctors::{CorrectorBasis, SparseVector};
use super::projection::CoarseProjection;
use crate::dg::{DGVector, DgOperators};
use crate::error::{Error, Result};
use crate::solver::{factorize, SparseOperator, TripletBuilder};

/// Coarse coefficients over `(T, j)` and the corresponding fine function
/// `sum_k c_k (lambda_k - phi_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleSolution {
    pub coarse_coefficients: Vec<f64>,
    pub fine_representation: DGVector,
}

/// The corrected basis `psi_k = lambda_k - phi_k` as sparse fine vectors.
pub fn corrected_basis(basis: &CorrectorBasis, proj: &CoarseProjection) -> Vec<SparseVector> {
    (0..basis.len())
        .into_par_iter()
        .map(|k| basis.corrected(proj, k))
        .collect()
}

/// `sum_k c_k psi_k`.
pub fn expand(psi: &[SparseVector], coefficients: &[f64], fine_dofs: usize) -> DGVector {
    let mut out = vec![0.0; fine_dofs];
    for (p, &c) in psi.iter().zip(coefficients) {
        for (&i, &v) in p.indices.iter().zip(&p.values) {
            out[i] += c * v;
        }
    }
    DGVector::from(out)
}

/// Galerkin matrix `K[i, j] = psi_i^T A psi_j` of `operator` on the corrected
/// basis and the load `F(psi_i)`.
///
/// Entries are nonzero only for basis functions with overlapping supports.
pub fn assemble_multiscale(
    psi: &[SparseVector],
    operator: &SparseOperator,
    load: &[f64],
) -> (SparseOperator, Vec<f64>) {
    let n = psi.len();
    let fine = operator.nrows();
    // psi as a fine x coarse matrix, read by fine row
    let mut t = TripletBuilder::new(fine, n);
    for (k, p) in psi.iter().enumerate() {
        for (&i, &v) in p.indices.iter().zip(&p.values) {
            t.add(i, k, v);
        }
    }
    let psi_rows = t.build();
    let op_t = operator.transpose();

    let columns: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let pj = &psi[j];
            // rows of A psi_j that can be nonzero
            let mut rows: Vec<usize> = pj
                .indices
                .iter()
                .flat_map(|&c| op_t.row(c).map(|(r, _)| r))
                .collect();
            rows.sort_unstable();
            rows.dedup();
            let mut dense = vec![0.0; fine];
            for (&i, &v) in pj.indices.iter().zip(&pj.values) {
                dense[i] = v;
            }
            let mut col = vec![0.0; n];
            let mut touched = vec![false; n];
            for r in rows {
                let y: f64 = operator.row(r).map(|(c, v)| v * dense[c]).sum();
                for (i, pv) in psi_rows.row(r) {
                    col[i] += pv * y;
                    touched[i] = true;
                }
            }
            (0..n).filter(|&i| touched[i]).map(|i| (i, col[i])).collect()
        })
        .collect();

    let mut k = TripletBuilder::new(n, n);
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col {
            k.add(i, j, v);
        }
    }
    let rhs = psi.iter().map(|p| p.dot(load)).collect();
    (k.build(), rhs)
}

pub fn solve_multiscale(
    k: &SparseOperator,
    rhs: &[f64],
    psi: &[SparseVector],
    fine_dofs: usize,
) -> Result<MultiscaleSolution> {
    let coefficients = factorize(k)
        .and_then(|f| f.solve(rhs))
        .map_err(|e| e.at_stage("coarse multiscale solve"))?;
    Ok(MultiscaleSolution {
        fine_representation: expand(psi, &coefficients, fine_dofs),
        coarse_coefficients: coefficients,
    })
}

/// `|||u_ref - u_ms||| / |||u_ref|||`.
pub fn relative_energy_error(u_ref: &[f64], u_ms: &MultiscaleSolution, ops: &DgOperators) -> Result<f64> {
    let denom = ops.energy_norm(u_ref)?;
    if denom == 0.0 {
        return Err(Error::ZeroReferenceNorm);
    }
    let diff: Vec<f64> = u_ref
        .iter()
        .zip(u_ms.fine_representation.iter())
        .map(|(a, b)| a - b)
        .collect();
    Ok(ops.energy_norm(&diff)? / denom)
}

/// Splits `v` into `v_ms = (1 - F) Pi_H v` in the corrected space and the
/// fine-scale remainder `v - v_ms`, which lies in the kernel of `Pi_H`.
pub fn decompose(v: &[f64], psi: &[SparseVector], proj: &CoarseProjection) -> (DGVector, DGVector) {
    let coarse = proj.project(v);
    let v_ms = expand(psi, &coarse, v.len());
    let v_f = DGVector::from(v.iter().zip(v_ms.iter()).map(|(a, b)| a - b).collect::<Vec<_>>());
    (v_ms, v_f)
}
