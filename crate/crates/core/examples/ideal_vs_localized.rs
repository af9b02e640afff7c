//! Localization error at a fixed coarse level: growing patches against the
//! ideal correctors, and correctors built from the full form against
//! diffusion-only correctors.

use dglod::coeff::CoefficientField;
use dglod::dg::{assemble_load, solve_with, AssemblyConfig, DGSpace, DgOperators};
use dglod::lod::{build_projection, relative_energy_error, run_multiscale, CorrectorMode, Layers};
use dglod::mesh::MeshHierarchy;

fn main() -> dglod::Result<()> {
    let hier = MeshHierarchy::new(8, 32)?;
    let field = CoefficientField::constant(1.0, [32.0, 0.0])?;
    let cfg = AssemblyConfig::default();
    let space = DGSpace::new(hier.fine());
    let ops = DgOperators::assemble(&space, &field, &cfg)?;
    let load = assemble_load(&space, &|x, y| 1.0 + (6.0 * x).cos() * (6.0 * y).cos(), &cfg).into_inner();
    let reference = solve_with(&ops, &load)?;
    let proj = build_projection(&hier);

    for mode in [CorrectorMode::Convective, CorrectorMode::DiffusionOnly] {
        println!("{mode:?}");
        let layers = (1..=4).map(Layers::Local).chain([Layers::Ideal]);
        for l in layers {
            let run = run_multiscale(&hier, &ops, &proj, &load, l, mode)?;
            let err = relative_energy_error(&reference, &run.solution, &ops)?;
            println!("  {l:?}: {err:.4e}");
        }
    }
    Ok(())
}
