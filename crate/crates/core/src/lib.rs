//! Two-level discontinuous Galerkin multiscale solver for convection-diffusion
//! problems `-div(A grad u) + b . grad u = f` on the unit square with rough,
//! high-contrast diffusion.
//!
//! The fine space is the fully discontinuous bilinear (Q1) space on a uniform
//! quadrilateral mesh, discretized with symmetric interior penalty diffusion
//! and upwind convection. The coarse space is built from corrected coarse
//! basis functions `lambda - phi`, where each corrector `phi` solves a
//! patch-local fine-scale problem constrained to the kernel of the coarse
//! L2 projection.
//!
//! Modules, bottom up:
//!
//! * [`mesh`]: nested structured meshes and coarse element patches
//! * [`coeff`]: piecewise-constant diffusion rasters and constant convection
//! * [`solver`]: sparse matrices, direct factorization, saddle-point solves
//! * [`dg`]: the DG space, bilinear form assembly, energy norms, VTK output
//! * [`lod`]: coarse projection, correctors, the multiscale solve, decay study
//! * [`experiment`]: configuration, convergence/decay/single runs, CSV output

pub mod coeff;
pub mod dg;
pub mod error;
pub mod experiment;
pub mod lod;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};
