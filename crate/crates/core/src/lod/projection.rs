use crate::dg::quadrature::gauss_legendre;
use crate::dg::{shape, DGVector, CORNERS};
use crate::mesh::MeshHierarchy;
use crate::solver::{SparseOperator, TripletBuilder};

/// Elementwise L2 projection of fine DG functions onto the coarse Q1 space,
/// with the constraint operator whose kernel is the fine-scale space.
#[derive(Debug, Clone)]
pub struct CoarseProjection {
    coarse_dofs: usize,
    fine_dofs: usize,
    /// rows `(T, k)`, columns fine dofs: `(lambda_{T,k}, phi_i)`
    constraint: SparseOperator,
    /// fine x coarse: nodal values of each coarse basis function on the fine mesh
    injection: SparseOperator,
    /// coarse x fine transpose of `injection`
    injection_t: SparseOperator,
    /// inverse of the (shared) coarse element mass matrix, row-major
    mass_inv: [f64; 16],
}

pub fn build_projection(hier: &MeshHierarchy) -> CoarseProjection {
    let coarse = hier.coarse();
    let fine = hier.fine();
    let hc = coarse.cell_size();
    let hf = fine.cell_size();
    let coarse_dofs = 4 * coarse.num_cells();
    let fine_dofs = 4 * fine.num_cells();
    let rule = gauss_legendre(2);

    let mut c = TripletBuilder::with_capacity(coarse_dofs, fine_dofs, 16 * fine.num_cells());
    let mut p = TripletBuilder::with_capacity(fine_dofs, coarse_dofs, 16 * fine.num_cells());
    for t in 0..coarse.num_cells() {
        let [cx0, cy0] = coarse.origin(t);
        for e in hier.children(t) {
            let [fx0, fy0] = fine.origin(e);
            let mut block = [[0.0; 4]; 4];
            for &(s, ws) in &rule {
                for &(r, wr) in &rule {
                    let (x, y) = (fx0 + s * hf, fy0 + r * hf);
                    let (xi, eta) = ((x - cx0) / hc, (y - cy0) / hc);
                    let w = ws * wr * hf * hf;
                    for (k, row) in block.iter_mut().enumerate() {
                        let lam = shape(k, xi, eta);
                        for (l, entry) in row.iter_mut().enumerate() {
                            *entry += w * lam * shape(l, s, r);
                        }
                    }
                }
            }
            for (k, row) in block.iter().enumerate() {
                for (l, &v) in row.iter().enumerate() {
                    c.add(4 * t + k, 4 * e + l, v);
                }
            }
            for (l, [sx, sy]) in CORNERS.iter().enumerate() {
                let (xi, eta) = ((fx0 + sx * hf - cx0) / hc, (fy0 + sy * hf - cy0) / hc);
                for k in 0..4 {
                    let v = shape(k, xi, eta);
                    if v != 0.0 {
                        p.add(4 * e + l, 4 * t + k, v);
                    }
                }
            }
        }
    }

    let mut mass = [0.0; 16];
    for &(s, ws) in &rule {
        for &(r, wr) in &rule {
            for k in 0..4 {
                for l in 0..4 {
                    mass[4 * k + l] += ws * wr * hc * hc * shape(k, s, r) * shape(l, s, r);
                }
            }
        }
    }

    let injection = p.build();
    CoarseProjection {
        coarse_dofs,
        fine_dofs,
        constraint: c.build(),
        injection_t: injection.transpose(),
        injection,
        mass_inv: invert4(mass),
    }
}

fn invert4(m: [f64; 16]) -> [f64; 16] {
    // Gauss-Jordan with partial pivoting on [m | I]
    let mut a = [[0.0; 8]; 4];
    for i in 0..4 {
        a[i][..4].copy_from_slice(&m[4 * i..4 * i + 4]);
        a[i][4 + i] = 1.0;
    }
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= d);
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                let pivot_row = a[col];
                a[r].iter_mut().zip(pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
    }
    let mut out = [0.0; 16];
    for i in 0..4 {
        out[4 * i..4 * i + 4].copy_from_slice(&a[i][4..]);
    }
    out
}

impl CoarseProjection {
    pub fn coarse_dofs(&self) -> usize {
        self.coarse_dofs
    }

    pub fn fine_dofs(&self) -> usize {
        self.fine_dofs
    }

    /// `C` with `ker C = { v : Pi_H v = 0 }`.
    pub fn constraint(&self) -> &SparseOperator {
        &self.constraint
    }

    pub fn injection(&self) -> &SparseOperator {
        &self.injection
    }

    /// Coarse coefficients of `Pi_H v`.
    pub fn project(&self, v: &[f64]) -> DGVector {
        let moments = self.constraint.mul_vec(v);
        let mut out = vec![0.0; self.coarse_dofs];
        for (m, o) in moments.chunks_exact(4).zip(out.chunks_exact_mut(4)) {
            for (k, ok) in o.iter_mut().enumerate() {
                *ok = (0..4).map(|l| self.mass_inv[4 * k + l] * m[l]).sum();
            }
        }
        DGVector::from(out)
    }

    /// A coarse function written in the fine basis.
    pub fn inject(&self, coarse: &[f64]) -> DGVector {
        DGVector::from(self.injection.mul_vec(coarse))
    }

    /// Fine-space nodal vector of the single coarse basis function `(T, k)`.
    pub fn basis_function(&self, coarse_dof: usize) -> DGVector {
        let mut v = vec![0.0; self.fine_dofs];
        for (i, x) in self.injection_t.row(coarse_dof) {
            v[i] = x;
        }
        DGVector::from(v)
    }

    /// Nonzero fine entries `(dof, value)` of the coarse basis function `(T, k)`.
    pub fn basis_support(&self, coarse_dof: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.injection_t.row(coarse_dof)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_inverse() {
        let hier = MeshHierarchy::new(2, 4).unwrap();
        let p = build_projection(&hier);
        // reference Q1 mass matrix is (h^2 / 36) [[4,2,2,1],[2,4,1,2],[2,1,4,2],[1,2,2,4]]
        let h2 = 0.25;
        let m = [
            4.0, 2.0, 2.0, 1.0, 2.0, 4.0, 1.0, 2.0, 2.0, 1.0, 4.0, 2.0, 1.0, 2.0, 2.0, 4.0,
        ];
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = (0..4)
                    .map(|k| h2 * m[4 * i + k] / 36.0 * p.mass_inv[4 * k + j])
                    .sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn projection_of_injection_is_identity() {
        let hier = MeshHierarchy::new(4, 16).unwrap();
        let p = build_projection(&hier);
        let c: Vec<f64> = (0..p.coarse_dofs()).map(|i| (i as f64 * 0.37).sin()).collect();
        let back = p.project(&p.inject(&c));
        for (a, b) in back.iter().zip(&c) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_of_one_is_one() {
        let hier = MeshHierarchy::new(2, 8).unwrap();
        let p = build_projection(&hier);
        let one = vec![1.0; p.fine_dofs()];
        assert!(p.project(&one).iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn equal_levels_project_exactly() {
        let hier = MeshHierarchy::new(4, 4).unwrap();
        let p = build_projection(&hier);
        let v: Vec<f64> = (0..p.fine_dofs()).map(|i| (i as f64).cos()).collect();
        let back = p.project(&v);
        assert!(back.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
