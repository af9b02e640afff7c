use std::collections::BTreeMap;

use rayon::prelude::*;

use super::projection::CoarseProjection;
use crate::dg::DgOperators;
use crate::error::{Error, Result};
use crate::mesh::{build_patch, MeshHierarchy};
use crate::solver::{SaddleFactorization, SparseOperator};

/// Which bilinear form the corrector problems use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrectorMode {
    /// full convection-diffusion form
    Convective,
    /// interior penalty diffusion only, for weak convection
    DiffusionOnly,
}

/// Patch size for the corrector problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layers {
    /// one global fine-scale problem per basis function
    Ideal,
    Local(usize),
}

/// Sparse vector with ascending indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| v * dense[i])
            .sum()
    }
}

/// Correctors `phi_{T,j}` for every coarse basis function, keyed by coarse
/// dof `4 * T + j`.
#[derive(Debug, Clone)]
pub struct CorrectorBasis {
    pub mode: CorrectorMode,
    pub layers: Layers,
    fine_dofs: usize,
    correctors: Vec<SparseVector>,
    /// coarse members of the patch each corrector lives on, per coarse element
    patches: Vec<Vec<usize>>,
}

impl CorrectorBasis {
    pub fn len(&self) -> usize {
        self.correctors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.correctors.is_empty()
    }

    pub fn fine_dofs(&self) -> usize {
        self.fine_dofs
    }

    pub fn corrector(&self, coarse_dof: usize) -> &SparseVector {
        &self.correctors[coarse_dof]
    }

    pub fn patch(&self, coarse_element: usize) -> &[usize] {
        &self.patches[coarse_element]
    }

    /// Corrected basis function `lambda_{T,j} - phi_{T,j}` as a sparse fine vector.
    pub fn corrected(&self, proj: &CoarseProjection, coarse_dof: usize) -> SparseVector {
        let phi = &self.correctors[coarse_dof];
        let mut values = phi.values.iter().map(|v| -v).collect::<Vec<_>>();
        let lambda = proj.basis_support(coarse_dof);
        let mut indices = phi.indices.clone();
        for (i, v) in lambda {
            match indices.binary_search(&i) {
                Ok(k) => values[k] += v,
                Err(k) => {
                    indices.insert(k, i);
                    values.insert(k, v);
                }
            }
        }
        SparseVector { indices, values }
    }
}

fn corrector_operator(ops: &DgOperators, mode: CorrectorMode) -> &SparseOperator {
    match mode {
        CorrectorMode::Convective => &ops.system,
        CorrectorMode::DiffusionOnly => &ops.diffusion,
    }
}

/// `(M x)[r]` for the listed rows only.
fn mul_rows(m: &SparseOperator, rows: &[usize], x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|&r| m.row(r).map(|(c, v)| v * x[c]).sum())
        .collect()
}

/// Solves the corrector problems of every basis function of the listed coarse
/// elements, all of which share the patch `coarse_members`.
fn solve_patch(
    hier: &MeshHierarchy,
    op: &SparseOperator,
    proj: &CoarseProjection,
    coarse_members: &[usize],
    centers: &[usize],
) -> Result<Vec<(usize, SparseVector)>> {
    let n_coarse = hier.coarse().n();
    let patch_dofs: Vec<usize> = if coarse_members.len() == n_coarse * n_coarse {
        (0..proj.fine_dofs()).collect()
    } else {
        let mut cells: Vec<usize> = coarse_members.iter().flat_map(|&t| hier.children(t)).collect();
        cells.sort_unstable();
        cells
            .iter()
            .flat_map(|&e| (0..4).map(move |k| 4 * e + k))
            .collect()
    };
    let rows: Vec<usize> = coarse_members
        .iter()
        .flat_map(|&t| (0..4).map(move |k| 4 * t + k))
        .collect();
    let factors = if coarse_members.len() == n_coarse * n_coarse {
        SaddleFactorization::new(op, proj.constraint())
    } else {
        let a = op.submatrix(&patch_dofs, &patch_dofs);
        let c = proj.constraint().submatrix(&rows, &patch_dofs);
        SaddleFactorization::new(&a, &c)
    };
    let factors = factors.map_err(|e| Error::Corrector {
        element: centers[0],
        local: 0,
        source: Box::new(e),
    })?;

    let mut out = Vec::with_capacity(4 * centers.len());
    // bounded batches keep the dense right-hand sides small
    for chunk in centers.chunks(16) {
        let dofs: Vec<usize> = chunk
            .iter()
            .flat_map(|&t| (0..4).map(move |j| 4 * t + j))
            .collect();
        let rhs: Vec<Vec<f64>> = dofs
            .iter()
            .map(|&d| mul_rows(op, &patch_dofs, &proj.basis_function(d)))
            .collect();
        let sols = factors.solve_many(&rhs).map_err(|e| Error::Corrector {
            element: chunk[0],
            local: 0,
            source: Box::new(e),
        })?;
        for (d, sol) in dofs.into_iter().zip(sols) {
            out.push((
                d,
                SparseVector {
                    indices: patch_dofs.clone(),
                    values: sol.x,
                },
            ));
        }
    }
    Ok(out)
}

/// Computes the corrector of every coarse basis function.
///
/// Localized correctors live in `V^f_h(omega^L_T)`: fine-scale functions that
/// vanish outside the patch. The patch problem is the restriction of the global
/// operator to patch dofs, with the kernel constraint of the patch's coarse
/// elements enforced by Lagrange multipliers. Coarse elements whose patches
/// coincide share one factorization.
pub fn compute_correctors(
    hier: &MeshHierarchy,
    ops: &DgOperators,
    proj: &CoarseProjection,
    layers: Layers,
    mode: CorrectorMode,
) -> Result<CorrectorBasis> {
    let op = corrector_operator(ops, mode);
    let n_cells = hier.coarse().num_cells();
    let full = hier.coarse().n();

    let patches: Vec<Vec<usize>> = (0..n_cells)
        .map(|t| match layers {
            Layers::Ideal => (0..n_cells).collect(),
            Layers::Local(l) => build_patch(hier, t, l.min(full)).coarse_members,
        })
        .collect();

    let mut groups: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for (t, members) in patches.iter().enumerate() {
        groups.entry(members.as_slice()).or_default().push(t);
    }
    let groups: Vec<(&[usize], Vec<usize>)> = groups.into_iter().collect();

    let solved: Vec<Vec<(usize, SparseVector)>> = groups
        .par_iter()
        .map(|(members, centers)| solve_patch(hier, op, proj, members, centers))
        .collect::<Result<_>>()?;

    let mut correctors = vec![SparseVector::default(); 4 * n_cells];
    for (d, v) in solved.into_iter().flatten() {
        correctors[d] = v;
    }
    Ok(CorrectorBasis {
        mode,
        layers,
        fine_dofs: proj.fine_dofs(),
        correctors,
        patches,
    })
}

/// Correctors of the four basis functions of one coarse element on its
/// `layers`-patch (or the whole domain).
pub fn element_correctors(
    hier: &MeshHierarchy,
    ops: &DgOperators,
    proj: &CoarseProjection,
    element: usize,
    layers: Layers,
    mode: CorrectorMode,
) -> Result<Vec<SparseVector>> {
    let n_cells = hier.coarse().num_cells();
    let members: Vec<usize> = match layers {
        Layers::Ideal => (0..n_cells).collect(),
        Layers::Local(l) => build_patch(hier, element, l.min(hier.coarse().n())).coarse_members,
    };
    let mut sols = solve_patch(hier, corrector_operator(ops, mode), proj, &members, &[element])?;
    sols.sort_by_key(|(d, _)| *d);
    Ok(sols.into_iter().map(|(_, v)| v).collect())
}
