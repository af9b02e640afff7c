use rayon::prelude::*;

use super::quadrature::gauss_legendre;
use super::{shape, shape_grad, AssemblyConfig, DGSpace, DGVector};
use crate::coeff::CoefficientField;
use crate::error::{Error, Result};
use crate::mesh::{Adjacency, Edge};
use crate::solver::{factorize, is_positive_definite, SparseOperator, TripletBuilder};

const FORM_POINTS: usize = 2;

/// Traces of the (up to) eight basis functions touching one edge at one
/// quadrature point.
struct EdgeTrace {
    dofs: Vec<usize>,
    /// `[phi]` for each local dof
    jump: Vec<f64>,
    /// `{phi}`
    avg: Vec<f64>,
    /// `{nu . A grad phi}`
    flux: Vec<f64>,
}

fn edge_sides(edge: &Edge) -> Vec<(usize, f64, f64)> {
    match edge.adjacency {
        Adjacency::Interior { minus, plus } => vec![(minus, 1.0, 0.5), (plus, -1.0, 0.5)],
        Adjacency::Boundary { element } => vec![(element, 1.0, 1.0)],
    }
}

fn edge_trace(space: &DGSpace, a: &[f64], edge: &Edge, t: f64) -> EdgeTrace {
    let h = space.level().cell_size();
    let p = edge.point(t);
    let sides = edge_sides(edge);
    let len = 4 * sides.len();
    let mut tr = EdgeTrace {
        dofs: Vec::with_capacity(len),
        jump: Vec::with_capacity(len),
        avg: Vec::with_capacity(len),
        flux: Vec::with_capacity(len),
    };
    for (cell, sign, weight) in sides {
        let [xi, eta] = space.local_coords(cell, p);
        for k in 0..4 {
            let v = shape(k, xi, eta);
            let [gx, gy] = shape_grad(k, xi, eta);
            let dn = (edge.normal[0] * gx + edge.normal[1] * gy) / h;
            tr.dofs.push(4 * cell + k);
            tr.jump.push(sign * v);
            tr.avg.push(weight * v);
            tr.flux.push(weight * a[cell] * dn);
        }
    }
    tr
}

fn edge_penalty(a: &[f64], edge: &Edge, sigma_scale: f64) -> f64 {
    let amax = edge_sides(edge).iter().map(|&(c, _, _)| a[c]).fold(0.0, f64::max);
    sigma_scale * amax / edge.length
}

/// Collects local dense blocks, computed in parallel, into a matrix. Blocks are
/// appended in item order so the result does not depend on the thread count.
fn collect_blocks<F>(n: usize, items: usize, local: F) -> SparseOperator
where
    F: Fn(usize) -> (Vec<usize>, Vec<f64>) + Sync + Send,
{
    let blocks: Vec<(Vec<usize>, Vec<f64>)> = (0..items).into_par_iter().map(&local).collect();
    let cap = blocks.iter().map(|(_, m)| m.len()).sum();
    let mut t = TripletBuilder::with_capacity(n, n, cap);
    for (dofs, m) in blocks {
        let k = dofs.len();
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                t.add(gi, gj, m[i * k + j]);
            }
        }
    }
    t.build()
}

fn cell_block<F>(space: &DGSpace, cell: usize, integrand: F) -> (Vec<usize>, Vec<f64>)
where
    F: Fn(usize, usize, f64, f64) -> f64,
{
    let h = space.level().cell_size();
    let rule = gauss_legendre(FORM_POINTS);
    let mut m = vec![0.0; 16];
    for &(xi, wx) in &rule {
        for &(eta, wy) in &rule {
            let w = wx * wy * h * h;
            for i in 0..4 {
                for j in 0..4 {
                    m[i * 4 + j] += w * integrand(i, j, xi, eta);
                }
            }
        }
    }
    ((0..4).map(|k| 4 * cell + k).collect(), m)
}

fn edge_block<F>(space: &DGSpace, a: &[f64], edge: &Edge, integrand: F) -> (Vec<usize>, Vec<f64>)
where
    F: Fn(&EdgeTrace, usize, usize) -> f64,
{
    let rule = gauss_legendre(FORM_POINTS);
    let mut dofs = Vec::new();
    let mut m = Vec::new();
    for &(t, w) in &rule {
        let tr = edge_trace(space, a, edge, t);
        let k = tr.dofs.len();
        if m.is_empty() {
            m = vec![0.0; k * k];
            dofs = tr.dofs.clone();
        }
        for i in 0..k {
            for j in 0..k {
                m[i * k + j] += w * edge.length * integrand(&tr, i, j);
            }
        }
    }
    (dofs, m)
}

/// Symmetric interior penalty diffusion matrix, `M[i, j] = a_d(phi_j, phi_i)`.
pub fn assemble_diffusion(
    space: &DGSpace,
    field: &CoefficientField,
    cfg: &AssemblyConfig,
) -> Result<SparseOperator> {
    let mesh = space.level();
    let a = field.cell_values(mesh)?;
    let h = mesh.cell_size();
    let n = space.total_dofs();
    let volume = collect_blocks(n, mesh.num_cells(), |cell| {
        cell_block(space, cell, |i, j, xi, eta| {
            let gi = shape_grad(i, xi, eta);
            let gj = shape_grad(j, xi, eta);
            a[cell] * (gi[0] * gj[0] + gi[1] * gj[1]) / (h * h)
        })
    });
    let edges = mesh.edges();
    let faces = collect_blocks(n, edges.len(), |e| {
        let edge = &edges[e];
        let pen = edge_penalty(&a, edge, cfg.sigma_scale);
        edge_block(space, &a, edge, |tr, i, j| {
            pen * tr.jump[i] * tr.jump[j] - tr.flux[j] * tr.jump[i] - tr.flux[i] * tr.jump[j]
        })
    });
    Ok(volume.add_scaled(1.0, &faces, 1.0))
}

/// Upwind convection matrix for constant `b`.
pub fn assemble_convection(space: &DGSpace, field: &CoefficientField) -> Result<SparseOperator> {
    let mesh = space.level();
    let [bx, by] = field.b();
    let h = mesh.cell_size();
    let n = space.total_dofs();
    let volume = collect_blocks(n, mesh.num_cells(), |cell| {
        cell_block(space, cell, |i, j, xi, eta| {
            let gj = shape_grad(j, xi, eta);
            (bx * gj[0] + by * gj[1]) / h * shape(i, xi, eta)
        })
    });
    let ones = vec![1.0; mesh.num_cells()];
    let edges = mesh.edges();
    let faces = collect_blocks(n, edges.len(), |e| {
        let edge = &edges[e];
        let bn = bx * edge.normal[0] + by * edge.normal[1];
        if edge.is_boundary() {
            let inflow = 0.5 * (bn.abs() - bn);
            edge_block(space, &ones, edge, |tr, i, j| inflow * tr.jump[i] * tr.jump[j])
        } else {
            let be = 0.5 * bn.abs();
            edge_block(space, &ones, edge, |tr, i, j| {
                be * tr.jump[i] * tr.jump[j] - bn * tr.jump[j] * tr.avg[i]
            })
        }
    });
    Ok(volume.add_scaled(1.0, &faces, 1.0))
}

/// Load vector `(f, phi_i)` using the configured per-axis Gauss rule.
pub fn assemble_load(
    space: &DGSpace,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    cfg: &AssemblyConfig,
) -> DGVector {
    let mesh = space.level();
    let h = mesh.cell_size();
    let rule = gauss_legendre(cfg.load_points.max(1));
    let local: Vec<[f64; 4]> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let [x0, y0] = mesh.origin(cell);
            let mut out = [0.0; 4];
            for &(xi, wx) in &rule {
                for &(eta, wy) in &rule {
                    let fv = f(x0 + xi * h, y0 + eta * h) * wx * wy * h * h;
                    for (k, o) in out.iter_mut().enumerate() {
                        *o += fv * shape(k, xi, eta);
                    }
                }
            }
            out
        })
        .collect();
    DGVector::from(local.into_iter().flatten().collect::<Vec<_>>())
}

/// Matrices of the diffusion and convection parts of the squared energy norm:
/// `D` from `||A^{1/2} grad v||^2 + sum_e sigma_e/h ||[v]||_e^2`, `Cc` from
/// `sum_e b_e ||[v]||_e^2` with `b_e = |b . nu| / 2`, both over all edges.
pub fn assemble_norm_matrices(
    space: &DGSpace,
    field: &CoefficientField,
    cfg: &AssemblyConfig,
) -> Result<(SparseOperator, SparseOperator)> {
    let mesh = space.level();
    let a = field.cell_values(mesh)?;
    let [bx, by] = field.b();
    let h = mesh.cell_size();
    let n = space.total_dofs();
    let volume = collect_blocks(n, mesh.num_cells(), |cell| {
        cell_block(space, cell, |i, j, xi, eta| {
            let gi = shape_grad(i, xi, eta);
            let gj = shape_grad(j, xi, eta);
            a[cell] * (gi[0] * gj[0] + gi[1] * gj[1]) / (h * h)
        })
    });
    let edges = mesh.edges();
    let jumps = collect_blocks(n, edges.len(), |e| {
        let edge = &edges[e];
        let pen = edge_penalty(&a, edge, cfg.sigma_scale);
        edge_block(space, &a, edge, |tr, i, j| pen * tr.jump[i] * tr.jump[j])
    });
    let conv = collect_blocks(n, edges.len(), |e| {
        let edge = &edges[e];
        let be = 0.5 * (bx * edge.normal[0] + by * edge.normal[1]).abs();
        edge_block(space, &a, edge, |tr, i, j| be * tr.jump[i] * tr.jump[j])
    });
    Ok((volume.add_scaled(1.0, &jumps, 1.0), conv))
}

/// `sqrt(v^T (D + Cc) v)`, clamped at zero.
pub fn energy_norm(v: &[f64], d: &SparseOperator, cc: &SparseOperator) -> Result<f64> {
    for m in [d, cc] {
        if m.nrows() != v.len() || m.ncols() != v.len() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                got: v.len(),
            });
        }
    }
    Ok((d.bilinear(v, v) + cc.bilinear(v, v)).max(0.0).sqrt())
}

/// All fine-level operators needed by the reference and multiscale solves.
#[derive(Debug, Clone)]
pub struct DgOperators {
    /// interior penalty diffusion form
    pub diffusion: SparseOperator,
    /// upwind convection form
    pub convection: SparseOperator,
    /// `diffusion + convection`
    pub system: SparseOperator,
    pub norm_diffusion: SparseOperator,
    pub norm_convection: SparseOperator,
}

impl DgOperators {
    /// Assembles every operator and verifies that the diffusion form is
    /// positive definite at the configured penalty.
    pub fn assemble(space: &DGSpace, field: &CoefficientField, cfg: &AssemblyConfig) -> Result<Self> {
        let diffusion = assemble_diffusion(space, field, cfg)?;
        if !is_positive_definite(&diffusion) {
            return Err(Error::Coefficient(format!(
                "diffusion form is not positive definite with penalty scale {}",
                cfg.sigma_scale
            )));
        }
        let convection = assemble_convection(space, field)?;
        let system = diffusion.add_scaled(1.0, &convection, 1.0);
        let (norm_diffusion, norm_convection) = assemble_norm_matrices(space, field, cfg)?;
        Ok(Self {
            diffusion,
            convection,
            system,
            norm_diffusion,
            norm_convection,
        })
    }

    pub fn energy_norm(&self, v: &[f64]) -> Result<f64> {
        energy_norm(v, &self.norm_diffusion, &self.norm_convection)
    }

    /// Diffusion and convection parts of the energy norm separately.
    pub fn energy_norm_parts(&self, v: &[f64]) -> (f64, f64) {
        (
            self.norm_diffusion.bilinear(v, v).max(0.0).sqrt(),
            self.norm_convection.bilinear(v, v).max(0.0).sqrt(),
        )
    }
}

/// Solves `a_h(u, v) = (f, v)` on the fine space by sparse LU.
pub fn solve_reference(
    space: &DGSpace,
    field: &CoefficientField,
    cfg: &AssemblyConfig,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
) -> Result<DGVector> {
    let ops = DgOperators::assemble(space, field, cfg)?;
    let load = assemble_load(space, f, cfg);
    solve_with(&ops, &load)
}

pub fn solve_with(ops: &DgOperators, load: &[f64]) -> Result<DGVector> {
    Ok(DGVector::from(factorize(&ops.system)?.solve(load)?))
}
