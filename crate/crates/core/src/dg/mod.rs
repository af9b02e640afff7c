//! Discontinuous bilinear (Q1) space on a [`MeshLevel`] and the bilinear
//! forms of the interior-penalty/upwind discretization.
//!
//! Each cell carries four nodal basis functions at its corners, locally
//! ordered SW, SE, NW, NE; global dof `4 * cell + local`. Jumps and averages
//! across an interior edge are `[v] = v- - v+` and `{v} = (v- + v+) / 2` with
//! the edge normal pointing from `-` to `+`; on boundary edges both reduce to
//! the one-sided trace.

mod assembly;
pub mod quadrature;
pub mod vtk;

use std::ops::{Deref, DerefMut};

pub use assembly::{
    assemble_convection, assemble_diffusion, assemble_load, assemble_norm_matrices, energy_norm,
    solve_reference, solve_with, DgOperators,
};

use crate::mesh::MeshLevel;

pub const DOFS_PER_CELL: usize = 4;

/// Local corner coordinates in reference order SW, SE, NW, NE.
pub const CORNERS: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];

/// Reference basis value at local coordinates `(xi, eta)` in `[0, 1]^2`.
#[inline]
pub fn shape(k: usize, xi: f64, eta: f64) -> f64 {
    let [cx, cy] = CORNERS[k];
    let sx = if cx == 0.0 { 1.0 - xi } else { xi };
    let sy = if cy == 0.0 { 1.0 - eta } else { eta };
    sx * sy
}

/// Reference gradient (with respect to `xi`, `eta`).
#[inline]
pub fn shape_grad(k: usize, xi: f64, eta: f64) -> [f64; 2] {
    let [cx, cy] = CORNERS[k];
    let (sx, dsx) = if cx == 0.0 { (1.0 - xi, -1.0) } else { (xi, 1.0) };
    let (sy, dsy) = if cy == 0.0 { (1.0 - eta, -1.0) } else { (eta, 1.0) };
    [dsx * sy, sx * dsy]
}

/// Fully discontinuous Q1 space on one mesh level.
#[derive(Debug, Clone, Copy)]
pub struct DGSpace<'m> {
    level: &'m MeshLevel,
}

impl<'m> DGSpace<'m> {
    pub fn new(level: &'m MeshLevel) -> Self {
        Self { level }
    }

    pub fn level(&self) -> &'m MeshLevel {
        self.level
    }

    pub fn total_dofs(&self) -> usize {
        DOFS_PER_CELL * self.level.num_cells()
    }

    pub fn zeros(&self) -> DGVector {
        DGVector::zeros(self.total_dofs())
    }

    /// Local coordinates of a physical point relative to a cell.
    pub fn local_coords(&self, cell: usize, p: [f64; 2]) -> [f64; 2] {
        let [x0, y0] = self.level.origin(cell);
        let h = self.level.cell_size();
        [(p[0] - x0) / h, (p[1] - y0) / h]
    }

    /// Value of `v` restricted to `cell` at a physical point (which may lie
    /// on the cell boundary).
    pub fn eval(&self, v: &[f64], cell: usize, p: [f64; 2]) -> f64 {
        let [xi, eta] = self.local_coords(cell, p);
        (0..4).map(|k| v[4 * cell + k] * shape(k, xi, eta)).sum()
    }

    /// Physical gradient of `v` on `cell` at a point.
    pub fn eval_grad(&self, v: &[f64], cell: usize, p: [f64; 2]) -> [f64; 2] {
        let [xi, eta] = self.local_coords(cell, p);
        let h = self.level.cell_size();
        let mut g = [0.0; 2];
        for k in 0..4 {
            let [gx, gy] = shape_grad(k, xi, eta);
            g[0] += v[4 * cell + k] * gx / h;
            g[1] += v[4 * cell + k] * gy / h;
        }
        g
    }

    /// Nodal interpolant of a function, cell by cell (continuous functions
    /// give continuous DG vectors).
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> DGVector {
        let h = self.level.cell_size();
        let mut v = self.zeros();
        for cell in 0..self.level.num_cells() {
            let [x0, y0] = self.level.origin(cell);
            for (k, [cx, cy]) in CORNERS.iter().enumerate() {
                v[4 * cell + k] = f(x0 + cx * h, y0 + cy * h);
            }
        }
        v
    }

    /// Mean of `v` over each cell (the average of the four nodal values).
    pub fn cell_averages(&self, v: &[f64]) -> Vec<f64> {
        v.chunks_exact(4).map(|c| c.iter().sum::<f64>() / 4.0).collect()
    }
}

/// Coefficient vector of a DG function.
#[derive(Debug, Clone, PartialEq)]
pub struct DGVector {
    values: Vec<f64>,
}

impl DGVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl From<Vec<f64>> for DGVector {
    fn from(values: Vec<f64>) -> Self {
        Self { values }
    }
}

impl Deref for DGVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for DGVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Penalty scaling and load quadrature.
///
/// The edge penalty is `sigma_e / h_e` with `sigma_e = sigma_scale * max(A-, A+)`.
/// Bilinear forms always use 2-point Gauss rules (exact for Q1 with
/// piecewise-constant coefficients); `load_points` sets the per-axis rule for
/// the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyConfig {
    pub sigma_scale: f64,
    pub load_points: usize,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            sigma_scale: 10.0,
            load_points: 4,
        }
    }
}
