//! Same coarse levels, growing convection: error, rate and the size of
//! `H |b| / alpha` for each magnitude.

use dglod::experiment::{run_convergence, ExperimentConfig};

fn main() -> dglod::Result<()> {
    for c in [32.0, 64.0, 128.0] {
        let cfg = ExperimentConfig {
            coarse_exponents: vec![2, 3],
            fine_exponent: 5,
            b: [c, 0.0],
            ..ExperimentConfig::default()
        };
        let report = run_convergence(&cfg)?;
        println!("C = {c}");
        for row in &report.rows {
            println!(
                "  H={:<6} error {:.4e}  (diffusion {:.3e}, convection {:.3e})  H|b|/alpha = {}",
                row.coarse_h, row.rel_error, row.diff_part, row.conv_part, row.convection_ratio
            );
        }
        if let Some(s) = report.slope {
            println!("  slope {s:.2}");
        }
    }
    Ok(())
}
