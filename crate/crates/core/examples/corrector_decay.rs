//! Distance between ideal and patch-localized correctors of the central
//! coarse element as the patch grows, with and without convection.

use dglod::experiment::{run_decay, ExperimentConfig};

fn main() -> dglod::Result<()> {
    for b in [[0.0, 0.0], [64.0, 0.0]] {
        let cfg = ExperimentConfig {
            coarse_exponents: vec![3],
            fine_exponent: 5,
            b,
            ..ExperimentConfig::default()
        };
        let report = run_decay(&cfg)?;
        println!("b = {b:?}, element {}", report.element);
        for (l, d) in &report.profile {
            println!("  L={l}  {d:.3e}");
        }
        if let Some(g) = report.gamma {
            println!("  decay per layer {g:.3}");
        }
    }
    Ok(())
}
