use super::correctors::{element_correctors, CorrectorMode, Layers};
use super::projection::CoarseProjection;
use crate::dg::DgOperators;
use crate::error::Result;
use crate::mesh::MeshHierarchy;

/// Energy distance between ideal and localized correctors of one element,
/// maximized over its four basis functions, for each requested patch size.
pub fn corrector_decay_profile(
    hier: &MeshHierarchy,
    ops: &DgOperators,
    proj: &CoarseProjection,
    element: usize,
    layer_values: &[usize],
    mode: CorrectorMode,
) -> Result<Vec<(usize, f64)>> {
    let n = proj.fine_dofs();
    let ideal: Vec<Vec<f64>> = element_correctors(hier, ops, proj, element, Layers::Ideal, mode)?
        .iter()
        .map(|v| v.to_dense(n))
        .collect();
    layer_values
        .iter()
        .map(|&l| {
            let local = element_correctors(hier, ops, proj, element, Layers::Local(l), mode)?;
            let mut worst = 0.0f64;
            for (phi, phi_l) in ideal.iter().zip(&local) {
                let mut diff = phi.clone();
                for (&i, &v) in phi_l.indices.iter().zip(&phi_l.values) {
                    diff[i] -= v;
                }
                worst = worst.max(ops.energy_norm(&diff)?);
            }
            Ok((l, worst))
        })
        .collect()
}

/// Least-squares fit of `log(distance) = log(C) + L log(gamma)`; returns `gamma`.
///
/// Rows at or below `floor` (fully covered patches) are excluded; `None` when
/// fewer than two rows remain.
pub fn fit_decay_rate(profile: &[(usize, f64)], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .filter(|(_, d)| *d > floor)
        .map(|&(l, d)| (l as f64, d.ln()))
        .collect();
    crate::experiment::least_squares_slope(&pts).map(f64::exp)
}
