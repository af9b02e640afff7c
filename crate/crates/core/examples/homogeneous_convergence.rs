//! Convergence of the localized multiscale method for a constant diffusion
//! coefficient and moderate convection.
//!
//! ```text
//! cargo run --release --example homogeneous_convergence [fine_exponent]
//! ```

use dglod::experiment::{run_convergence, ExperimentConfig};
use dglod::lod::Layers;

fn main() -> dglod::Result<()> {
    let fine_exponent: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    // keep at least four fine cells per coarse cell along each axis
    let cfg = ExperimentConfig {
        coarse_exponents: (2..=fine_exponent.saturating_sub(2).max(2)).collect(),
        fine_exponent,
        b: [32.0, 0.0],
        ..ExperimentConfig::default()
    };
    let report = run_convergence(&cfg)?;
    println!("{:>8} {:>6} {:>3} {:>12}", "H", "N_dof", "L", "rel. error");
    for row in &report.rows {
        let layers = match row.layers {
            Layers::Ideal => "-".to_string(),
            Layers::Local(l) => l.to_string(),
        };
        println!(
            "{:>8} {:>6} {:>3} {:>12.4e}",
            row.coarse_h, row.coarse_dofs, layers, row.rel_error
        );
    }
    if let Some(s) = report.slope {
        println!("error ~ N_dof^{s:.2}");
    }
    Ok(())
}
