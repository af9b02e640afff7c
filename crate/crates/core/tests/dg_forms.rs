//! Bilinear forms checked against a brute-force edge/cell quadrature that
//! evaluates DG functions straight from their nodal values.

use dglod::coeff::{make_highcontrast, make_layered, CoefficientField, Raster};
use dglod::dg::{
    assemble_convection, assemble_diffusion, assemble_load, assemble_norm_matrices, solve_reference,
    AssemblyConfig, DGSpace, DgOperators,
};
use dglod::mesh::MeshLevel;
use dglod::solver::is_positive_definite;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// 3-point Gauss on [0, 1]
const G3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_3, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Nodal DG function on an `n x n` mesh, corners SW, SE, NW, NE per cell.
struct Field<'a> {
    n: usize,
    v: &'a [f64],
}

impl Field<'_> {
    fn h(&self) -> f64 {
        1.0 / self.n as f64
    }
    fn local(&self, cell: usize, x: f64, y: f64) -> (f64, f64) {
        let (ix, iy) = (cell % self.n, cell / self.n);
        (x / self.h() - ix as f64, y / self.h() - iy as f64)
    }
    fn value(&self, cell: usize, x: f64, y: f64) -> f64 {
        let (s, t) = self.local(cell, x, y);
        let c = &self.v[4 * cell..4 * cell + 4];
        c[0] * (1.0 - s) * (1.0 - t) + c[1] * s * (1.0 - t) + c[2] * (1.0 - s) * t + c[3] * s * t
    }
    fn grad(&self, cell: usize, x: f64, y: f64) -> (f64, f64) {
        let (s, t) = self.local(cell, x, y);
        let c = &self.v[4 * cell..4 * cell + 4];
        let dx = (-c[0] * (1.0 - t) + c[1] * (1.0 - t) - c[2] * t + c[3] * t) / self.h();
        let dy = (-c[0] * (1.0 - s) - c[1] * s + c[2] * (1.0 - s) + c[3] * s) / self.h();
        (dx, dy)
    }
}

/// (cell-, cell+ or None, point at parameter t, normal)
type OracleEdge = (usize, Option<usize>, Box<dyn Fn(f64) -> (f64, f64)>, (f64, f64));

fn edges(n: usize) -> Vec<OracleEdge> {
    let h = 1.0 / n as f64;
    let mut out: Vec<OracleEdge> = Vec::new();
    for iy in 0..n {
        for ix in 0..=n {
            let x = ix as f64 * h;
            let y0 = iy as f64 * h;
            let pt: Box<dyn Fn(f64) -> (f64, f64)> = Box::new(move |t| (x, y0 + t * h));
            if ix == 0 {
                out.push((iy * n, None, pt, (-1.0, 0.0)));
            } else if ix == n {
                out.push((iy * n + n - 1, None, pt, (1.0, 0.0)));
            } else {
                out.push((iy * n + ix - 1, Some(iy * n + ix), pt, (1.0, 0.0)));
            }
        }
    }
    for iy in 0..=n {
        for ix in 0..n {
            let y = iy as f64 * h;
            let x0 = ix as f64 * h;
            let pt: Box<dyn Fn(f64) -> (f64, f64)> = Box::new(move |t| (x0 + t * h, y));
            if iy == 0 {
                out.push((ix, None, pt, (0.0, -1.0)));
            } else if iy == n {
                out.push(((n - 1) * n + ix, None, pt, (0.0, 1.0)));
            } else {
                out.push(((iy - 1) * n + ix, Some(iy * n + ix), pt, (0.0, 1.0)));
            }
        }
    }
    out
}

fn volume<F: Fn(usize, f64, f64) -> f64>(n: usize, f: F) -> f64 {
    let h = 1.0 / n as f64;
    let mut s = 0.0;
    for cell in 0..n * n {
        let (x0, y0) = ((cell % n) as f64 * h, (cell / n) as f64 * h);
        for (a, wa) in G3 {
            for (b, wb) in G3 {
                s += wa * wb * h * h * f(cell, x0 + a * h, y0 + b * h);
            }
        }
    }
    s
}

fn sipg_oracle(n: usize, a: &[f64], sigma: f64, u: &[f64], v: &[f64], consistency: bool) -> f64 {
    let h = 1.0 / n as f64;
    let (fu, fv) = (Field { n, v: u }, Field { n, v });
    let mut s = volume(n, |c, x, y| {
        let (gu, gv) = (fu.grad(c, x, y), fv.grad(c, x, y));
        a[c] * (gu.0 * gv.0 + gu.1 * gv.1)
    });
    for (m, p, pt, nu) in edges(n) {
        let am = a[m];
        let amax = p.map_or(am, |p| am.max(a[p]));
        for (t, w) in G3 {
            let (x, y) = pt(t);
            let flux = |f: &Field, c: usize| {
                let g = f.grad(c, x, y);
                a[c] * (nu.0 * g.0 + nu.1 * g.1)
            };
            let (ju, jv, au, av) = match p {
                Some(p) => (
                    fu.value(m, x, y) - fu.value(p, x, y),
                    fv.value(m, x, y) - fv.value(p, x, y),
                    0.5 * (flux(&fu, m) + flux(&fu, p)),
                    0.5 * (flux(&fv, m) + flux(&fv, p)),
                ),
                None => (fu.value(m, x, y), fv.value(m, x, y), flux(&fu, m), flux(&fv, m)),
            };
            let mut term = sigma * amax / h * ju * jv;
            if consistency {
                term -= au * jv + av * ju;
            }
            s += w * h * term;
        }
    }
    s
}

fn upwind_oracle(n: usize, b: (f64, f64), u: &[f64], v: &[f64]) -> f64 {
    let h = 1.0 / n as f64;
    let (fu, fv) = (Field { n, v: u }, Field { n, v });
    let mut s = volume(n, |c, x, y| {
        let g = fu.grad(c, x, y);
        (b.0 * g.0 + b.1 * g.1) * fv.value(c, x, y)
    });
    for (m, p, pt, nu) in edges(n) {
        let bn = b.0 * nu.0 + b.1 * nu.1;
        for (t, w) in G3 {
            let (x, y) = pt(t);
            let term = match p {
                Some(p) => {
                    let ju = fu.value(m, x, y) - fu.value(p, x, y);
                    let jv = fv.value(m, x, y) - fv.value(p, x, y);
                    let av = 0.5 * (fv.value(m, x, y) + fv.value(p, x, y));
                    0.5 * bn.abs() * ju * jv - bn * ju * av
                }
                None => 0.5 * (bn.abs() - bn) * fu.value(m, x, y) * fv.value(m, x, y),
            };
            s += w * h * term;
        }
    }
    s
}

/// `sum_e b_e ||[v]||^2` over all edges, boundary traces included.
fn jump_oracle(n: usize, b: (f64, f64), v: &[f64]) -> f64 {
    let h = 1.0 / n as f64;
    let fv = Field { n, v };
    let mut s = 0.0;
    for (m, p, pt, nu) in edges(n) {
        let be = 0.5 * (b.0 * nu.0 + b.1 * nu.1).abs();
        for (t, w) in G3 {
            let (x, y) = pt(t);
            let j = fv.value(m, x, y) - p.map_or(0.0, |p| fv.value(p, x, y));
            s += w * h * be * j * j;
        }
    }
    s
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn constant_on_single_cell_is_boundary_penalty() {
    let m = MeshLevel::new(1).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [0.0, 0.0]).unwrap();
    let d = assemble_diffusion(&s, &field, &AssemblyConfig::default()).unwrap();
    let one = vec![1.0; 4];
    // four boundary edges of length 1, sigma_e / h_e = 10
    assert!((d.bilinear(&one, &one) - 40.0).abs() < 1e-12);
}

#[test]
fn diffusion_matches_quadrature_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, raster) in [
        (2, Raster::constant(1.0).unwrap()),
        (4, make_layered(4, 1.0, 0.01).unwrap()),
        (4, make_highcontrast(2, 3, 0.05, 1e3).unwrap()),
    ] {
        let m = MeshLevel::new(n).unwrap();
        let s = DGSpace::new(&m);
        let field = CoefficientField::new(raster, [0.0, 0.0]);
        let a = field.cell_values(&m).unwrap();
        let cfg = AssemblyConfig::default();
        let d = assemble_diffusion(&s, &field, &cfg).unwrap();
        for _ in 0..5 {
            let u = random_vec(&mut rng, s.total_dofs());
            let v = random_vec(&mut rng, s.total_dofs());
            let exact = sipg_oracle(n, &a, cfg.sigma_scale, &u, &v, true);
            let got = d.bilinear(&v, &u);
            assert!(
                (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "{got} vs {exact}"
            );
        }
    }
}

#[test]
fn continuous_functions_have_no_interior_jump_terms() {
    let m = MeshLevel::new(4).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [0.0, 0.0]).unwrap();
    let cfg = AssemblyConfig::default();
    let d = assemble_diffusion(&s, &field, &cfg).unwrap();
    let v = s.interpolate(|x, y| 1.0 + x * y - 2.0 * y * y);
    // integral of |grad v|^2 plus the boundary edge terms
    let fv = Field { n: 4, v: &v };
    let grad2 = volume(4, |c, x, y| {
        let g = fv.grad(c, x, y);
        g.0 * g.0 + g.1 * g.1
    });
    let mut boundary = 0.0;
    for (mcell, p, pt, nu) in edges(4) {
        if p.is_some() {
            continue;
        }
        for (t, w) in G3 {
            let (x, y) = pt(t);
            let val = fv.value(mcell, x, y);
            let g = fv.grad(mcell, x, y);
            boundary += w * 0.25 * (10.0 / 0.25 * val * val - 2.0 * (nu.0 * g.0 + nu.1 * g.1) * val);
        }
    }
    let got = d.bilinear(&v, &v);
    assert!((got - grad2 - boundary).abs() < 1e-11 * got.abs());
}

#[test]
fn convection_matches_quadrature_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = MeshLevel::new(3).unwrap();
    let s = DGSpace::new(&m);
    for b in [(32.0, 0.0), (-3.0, 1.5), (0.0, -7.0)] {
        let field = CoefficientField::constant(1.0, [b.0, b.1]).unwrap();
        let c = assemble_convection(&s, &field).unwrap();
        for _ in 0..5 {
            let u = random_vec(&mut rng, s.total_dofs());
            let v = random_vec(&mut rng, s.total_dofs());
            let exact = upwind_oracle(3, b, &u, &v);
            let got = c.bilinear(&v, &u);
            assert!(
                (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "{got} vs {exact}"
            );
        }
    }
}

#[test]
fn convection_zero_for_zero_b() {
    let m = MeshLevel::new(3).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [0.0, 0.0]).unwrap();
    let c = assemble_convection(&s, &field).unwrap();
    assert_eq!(c.max_abs(), 0.0);
}

#[test]
fn convection_volume_exact_for_linear_u() {
    let m = MeshLevel::new(4).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [5.0, 0.0]).unwrap();
    let c = assemble_convection(&s, &field).unwrap();
    // u = x is continuous and vanishes on the inflow boundary x = 0, so only
    // the volume term (b . grad u, v) = 5 * integral(v) survives
    let u = s.interpolate(|x, _| x);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = random_vec(&mut rng, s.total_dofs());
    let integral_v: f64 = v.iter().sum::<f64>() * (0.25 * 0.25) / 4.0;
    assert!((c.bilinear(&v, &u) - 5.0 * integral_v).abs() < 1e-13);
}

#[test]
fn norm_matrices_against_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let m = MeshLevel::new(4).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::new(make_layered(4, 1.0, 0.01).unwrap(), [3.0, -2.0]);
    let a = field.cell_values(&m).unwrap();
    let cfg = AssemblyConfig::default();
    let (d, cc) = assemble_norm_matrices(&s, &field, &cfg).unwrap();
    for _ in 0..5 {
        let v = random_vec(&mut rng, s.total_dofs());
        let dv = sipg_oracle(4, &a, cfg.sigma_scale, &v, &v, false);
        assert!((d.bilinear(&v, &v) - dv).abs() < 1e-11 * dv);
        let cv = jump_oracle(4, (3.0, -2.0), &v);
        assert!((cc.bilinear(&v, &v) - cv).abs() < 1e-11 * cv);
    }
    assert!(d.asymmetry() == 0.0 && cc.asymmetry() == 0.0);
}

#[test]
fn single_vertical_jump_convection_part() {
    let m = MeshLevel::new(4).unwrap();
    let s = DGSpace::new(&m);
    let h = m.cell_size();
    let field = CoefficientField::constant(1.0, [32.0, 0.0]).unwrap();
    let (_, cc) = assemble_norm_matrices(&s, &field, &AssemblyConfig::default()).unwrap();
    // v = local x on cell (1, 1): zero on its left edge, one on its right edge;
    // horizontal jumps carry no weight since b . nu = 0 there
    let mut v = s.zeros();
    let cell = m.cell_index(1, 1);
    v[4 * cell + 1] = 1.0;
    v[4 * cell + 3] = 1.0;
    assert!((cc.bilinear(&v, &v) - 16.0 * h).abs() < 1e-14);
}

#[test]
fn continuous_interior_function_has_no_convection_norm() {
    let m = MeshLevel::new(4).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [7.0, 3.0]).unwrap();
    let (_, cc) = assemble_norm_matrices(&s, &field, &AssemblyConfig::default()).unwrap();
    let v = s.interpolate(|x, y| x * (1.0 - x) * y * (1.0 - y));
    assert!(cc.bilinear(&v, &v).abs() < 1e-14);
}

#[test]
fn load_vector_entries() {
    let m = MeshLevel::new(1).unwrap();
    let s = DGSpace::new(&m);
    let cfg = AssemblyConfig::default();
    let one = assemble_load(&s, &|_, _| 1.0, &cfg);
    assert!(one.iter().all(|&e| (e - 0.25).abs() < 1e-15));
    let zero = assemble_load(&s, &|_, _| 0.0, &cfg);
    assert!(zero.iter().all(|&e| e == 0.0));

    let m = MeshLevel::new(16).unwrap();
    let s = DGSpace::new(&m);
    let f = |x: f64, y: f64| {
        1.0 + (2.0 * std::f64::consts::PI * x).cos() * (2.0 * std::f64::consts::PI * y).cos()
    };
    let total: f64 = assemble_load(&s, &f, &cfg).iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn diffusion_symmetric_and_coercive_on_all_families() {
    let cfg = AssemblyConfig::default();
    let m = MeshLevel::new(16).unwrap();
    let s = DGSpace::new(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for raster in [
        Raster::constant(1.0).unwrap(),
        make_layered(16, 1.0, 0.01).unwrap(),
        make_highcontrast(16, 0, 0.05, 4e5).unwrap(),
    ] {
        let field = CoefficientField::new(raster, [0.0, 0.0]);
        let d = assemble_diffusion(&s, &field, &cfg).unwrap();
        assert!(d.asymmetry() <= 1e-12 * d.max_abs());
        assert!(is_positive_definite(&d));
        for _ in 0..100 {
            let v = random_vec(&mut rng, s.total_dofs());
            assert!(d.bilinear(&v, &v) > 0.0);
        }
    }
}

#[test]
fn small_penalty_is_rejected() {
    let m = MeshLevel::new(4).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [0.0, 0.0]).unwrap();
    let cfg = AssemblyConfig {
        sigma_scale: 0.1,
        ..AssemblyConfig::default()
    };
    assert!(DgOperators::assemble(&s, &field, &cfg).is_err());
}

#[test]
fn reference_solution_residual_and_orthogonality() {
    let m = MeshLevel::new(32).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [32.0, 0.0]).unwrap();
    let cfg = AssemblyConfig::default();
    let f = |x: f64, y: f64| {
        1.0 + (2.0 * std::f64::consts::PI * x).cos() * (2.0 * std::f64::consts::PI * y).cos()
    };
    let ops = DgOperators::assemble(&s, &field, &cfg).unwrap();
    let load = assemble_load(&s, &f, &cfg);
    let u = dglod::dg::solve_with(&ops, &load).unwrap();
    let au = ops.system.mul_vec(&u);
    let fmax = load.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let res = au
        .iter()
        .zip(load.iter())
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    assert!(res <= 1e-10 * fmax, "residual {res}");

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let w = random_vec(&mut rng, s.total_dofs());
        let lhs = ops.system.bilinear(&w, &u);
        let rhs: f64 = w.iter().zip(load.iter()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-3));
    }

    let zero = solve_reference(&s, &field, &cfg, &|_, _| 0.0).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
}

#[test]
fn poisson_energy_stable_under_refinement() {
    let cfg = AssemblyConfig::default();
    let field = CoefficientField::constant(1.0, [0.0, 0.0]).unwrap();
    let norms: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let m = MeshLevel::new(n).unwrap();
            let s = DGSpace::new(&m);
            let ops = DgOperators::assemble(&s, &field, &cfg).unwrap();
            let u = dglod::dg::solve_with(&ops, &assemble_load(&s, &|_, _| 1.0, &cfg)).unwrap();
            ops.energy_norm(&u).unwrap()
        })
        .collect();
    // successive differences shrink, i.e. the norm converges
    let d1 = (norms[1] - norms[0]).abs();
    let d2 = (norms[2] - norms[1]).abs();
    assert!(d2 < 0.6 * d1, "{norms:?}");
    assert!((norms[2] / norms[0] - 1.0).abs() < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn upwind_form_is_jump_sum(bx in -50.0f64..50.0, by in -50.0f64..50.0, seed in any::<u64>()) {
        let m = MeshLevel::new(3).unwrap();
        let s = DGSpace::new(&m);
        let field = CoefficientField::constant(1.0, [bx, by]).unwrap();
        let c = assemble_convection(&s, &field).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_vec(&mut rng, s.total_dofs());
        let q = c.bilinear(&v, &v);
        let vv: f64 = v.iter().map(|x| x * x).sum();
        prop_assert!(q >= -1e-12 * vv);
        let expected = jump_oracle(3, (bx, by), &v);
        prop_assert!((q - expected).abs() <= 1e-10 * expected.max(1.0));
    }

    #[test]
    fn energy_norm_homogeneous(scale in -4.0f64..4.0, seed in any::<u64>()) {
        let m = MeshLevel::new(2).unwrap();
        let s = DGSpace::new(&m);
        let field = CoefficientField::constant(1.0, [3.0, 1.0]).unwrap();
        let (d, cc) = assemble_norm_matrices(&s, &field, &AssemblyConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_vec(&mut rng, s.total_dofs());
        let sv: Vec<f64> = v.iter().map(|x| scale * x).collect();
        let n1 = dglod::dg::energy_norm(&v, &d, &cc).unwrap();
        let n2 = dglod::dg::energy_norm(&sv, &d, &cc).unwrap();
        prop_assert!((n2 - scale.abs() * n1).abs() <= 1e-12 * n1.max(1.0));
        prop_assert!(n1 >= d.bilinear(&v, &v).max(0.0).sqrt() - 1e-14);
    }
}

#[test]
fn energy_norm_zero_and_mismatch() {
    let m = MeshLevel::new(2).unwrap();
    let s = DGSpace::new(&m);
    let field = CoefficientField::constant(1.0, [3.0, 1.0]).unwrap();
    let (d, cc) = assemble_norm_matrices(&s, &field, &AssemblyConfig::default()).unwrap();
    assert_eq!(dglod::dg::energy_norm(&s.zeros(), &d, &cc).unwrap(), 0.0);
    assert!(dglod::dg::energy_norm(&[1.0, 2.0], &d, &cc).is_err());
}
