//! Seeded log-uniform coefficient with contrast 4e5 and strong convection.

use dglod::coeff::make_highcontrast;
use dglod::experiment::{run_convergence, CoefficientSpec, ExperimentConfig};

fn main() -> dglod::Result<()> {
    let raster = make_highcontrast(32, 0, 0.05, 4e5)?;
    println!("coefficient range [{:.3e}, {:.3e}]", raster.min(), raster.max());

    let cfg = ExperimentConfig {
        coarse_exponents: vec![2, 3],
        fine_exponent: 5,
        b: [512.0, 0.0],
        seed: 0,
        coefficient: CoefficientSpec::Highcontrast {
            resolution: 32,
            alpha_floor: 0.05,
            contrast: 4e5,
        },
        ..ExperimentConfig::default()
    };
    let report = run_convergence(&cfg)?;
    for row in &report.rows {
        println!(
            "H={:<6} L={:?} error {:.4e}  H|b|/alpha = {:.0}",
            row.coarse_h, row.layers, row.rel_error, row.convection_ratio
        );
    }
    Ok(())
}
