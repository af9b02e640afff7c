//! One multiscale solve; writes reference, multiscale and difference cell
//! averages as legacy VTK files.
//!
//! ```text
//! cargo run --release --example single_solve_vtk [output_dir]
//! ```

use std::path::PathBuf;

use dglod::experiment::{run_single, ExperimentConfig};

fn main() -> dglod::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("dglod-single"));
    let cfg = ExperimentConfig {
        coarse_exponents: vec![3],
        fine_exponent: 6,
        b: [128.0, 0.0],
        ..ExperimentConfig::default()
    };
    let report = run_single(&cfg)?;
    print!("{}", report.summary());
    report.write(&out, &cfg)?;
    println!("fields written to {}", out.display());
    Ok(())
}
