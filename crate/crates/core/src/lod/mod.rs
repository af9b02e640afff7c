//! Two-level multiscale machinery: the coarse L2 projection and its kernel,
//! patch-local correctors, the Galerkin system on the corrected coarse basis
//! and corrector decay measurements.

mod correctors;
mod decay;
mod multiscale;
mod projection;

pub use correctors::{
    compute_correctors, element_correctors, CorrectorBasis, CorrectorMode, Layers, SparseVector,
};
pub use decay::{corrector_decay_profile, fit_decay_rate};
pub use multiscale::{
    assemble_multiscale, corrected_basis, decompose, expand, relative_energy_error, solve_multiscale,
    MultiscaleSolution,
};
pub use projection::{build_projection, CoarseProjection};

use crate::coeff::CoefficientField;
use crate::dg::{assemble_load, AssemblyConfig, DGSpace, DgOperators};
use crate::error::Result;
use crate::mesh::MeshHierarchy;

/// Everything a multiscale run produces.
#[derive(Debug, Clone)]
pub struct MultiscaleRun {
    pub basis: CorrectorBasis,
    pub solution: MultiscaleSolution,
    /// number of coarse unknowns
    pub coarse_dofs: usize,
}

/// Correctors, coarse system and solve for a given fine discretization.
pub fn run_multiscale(
    hier: &MeshHierarchy,
    ops: &DgOperators,
    proj: &CoarseProjection,
    load: &[f64],
    layers: Layers,
    mode: CorrectorMode,
) -> Result<MultiscaleRun> {
    let basis =
        compute_correctors(hier, ops, proj, layers, mode).map_err(|e| e.at_stage("corrector computation"))?;
    let psi = corrected_basis(&basis, proj);
    let (k, rhs) = assemble_multiscale(&psi, &ops.system, load);
    let solution = solve_multiscale(&k, &rhs, &psi, proj.fine_dofs())?;
    Ok(MultiscaleRun {
        coarse_dofs: basis.len(),
        basis,
        solution,
    })
}

/// Fine operators, load, projection and multiscale solution from scratch.
pub fn solve_problem(
    hier: &MeshHierarchy,
    field: &CoefficientField,
    cfg: &AssemblyConfig,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    layers: Layers,
    mode: CorrectorMode,
) -> Result<(DgOperators, Vec<f64>, MultiscaleRun)> {
    let space = DGSpace::new(hier.fine());
    let ops = DgOperators::assemble(&space, field, cfg)?;
    let load = assemble_load(&space, f, cfg).into_inner();
    let proj = build_projection(hier);
    let run = run_multiscale(hier, &ops, &proj, &load, layers, mode)?;
    Ok((ops, load, run))
}
