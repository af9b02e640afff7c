//! Horizontal layers alternating between 1 and 0.01, weak convection along
//! the layers.

use dglod::experiment::{run_convergence, CoefficientSpec, ExperimentConfig};

fn main() -> dglod::Result<()> {
    let cfg = ExperimentConfig {
        coarse_exponents: vec![2, 3],
        fine_exponent: 5,
        b: [1.0, 0.0],
        coefficient: CoefficientSpec::Layered {
            resolution: 32,
            hi: 1.0,
            lo: 0.01,
        },
        ..ExperimentConfig::default()
    };
    let field = cfg.field()?;
    println!("contrast {:.0}", field.beta() / field.alpha());
    let report = run_convergence(&cfg)?;
    for row in &report.rows {
        println!(
            "H={:<6} N_dof={:<5} error {:.4e}",
            row.coarse_h, row.coarse_dofs, row.rel_error
        );
    }
    Ok(())
}
