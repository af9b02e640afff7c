use dglod::mesh::{build_patch, MeshHierarchy};
use proptest::prelude::*;

fn hierarchy() -> impl Strategy<Value = MeshHierarchy> {
    (0u32..=4, 0u32..=2).prop_map(|(c, extra)| MeshHierarchy::new(1 << c, 1 << (c + extra)).unwrap())
}

proptest! {
    #[test]
    fn fine_cells_nest_in_their_parent(hier in hierarchy()) {
        let h = hier.coarse().cell_size();
        for f in 0..hier.fine().num_cells() {
            let [x, y] = hier.fine().centroid(f);
            let [ox, oy] = hier.coarse().origin(hier.parent(f));
            prop_assert!(x > ox && x < ox + h && y > oy && y < oy + h);
        }
    }

    #[test]
    fn children_partition_the_fine_mesh(hier in hierarchy()) {
        let mut seen = vec![0usize; hier.fine().num_cells()];
        for t in 0..hier.coarse().num_cells() {
            let kids = hier.children(t);
            prop_assert_eq!(kids.len(), hier.ratio() * hier.ratio());
            for f in kids {
                prop_assert_eq!(hier.parent(f), t);
                seen[f] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn interior_patches_are_square(c in 2u32..=4, layers in 0usize..4) {
        let hier = MeshHierarchy::new(1 << c, 1 << c).unwrap();
        let n = hier.coarse().n();
        for t in 0..n * n {
            let cell = hier.coarse().cell(t);
            let interior = cell.ix >= layers && cell.iy >= layers
                && cell.ix + layers < n && cell.iy + layers < n;
            let patch = build_patch(&hier, t, layers);
            if interior {
                prop_assert_eq!(patch.coarse_members.len(), (2 * layers + 1).pow(2));
            }
            prop_assert!(patch.coarse_members.contains(&t));
            prop_assert_eq!(patch.fine_dofs.len(), 4 * patch.fine_members.len());
        }
    }

    #[test]
    fn patches_grow_monotonically(hier in hierarchy(), layers in 0usize..5) {
        let t = hier.coarse().num_cells() / 2;
        let small = build_patch(&hier, t, layers);
        let big = build_patch(&hier, t, layers + 1);
        prop_assert!(small.coarse_members.iter().all(|m| big.coarse_members.contains(m)));
    }

    #[test]
    fn wide_patches_cover_the_domain(hier in hierarchy()) {
        let n = hier.coarse().n();
        for t in 0..n * n {
            let patch = build_patch(&hier, t, n.saturating_sub(1));
            prop_assert!(patch.covers(&hier));
            prop_assert_eq!(patch.fine_members.len(), hier.fine().num_cells());
        }
    }
}

#[test]
fn edge_normals_are_unit_and_axis_aligned() {
    let hier = MeshHierarchy::new(2, 8).unwrap();
    for e in hier.fine().edges() {
        let [nx, ny] = e.normal;
        assert_eq!(nx * nx + ny * ny, 1.0);
        assert!(nx == 0.0 || ny == 0.0);
    }
}
