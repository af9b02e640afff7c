//! Reads the diffusion coefficient from a plain-text raster file.
//!
//! The format is a header line `nx ny` followed by `ny` rows of `nx` positive
//! values, bottom row first.

use std::fs;

use dglod::coeff::{load_raster, Raster};
use dglod::experiment::{run_convergence, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("dglod-raster-example");
    fs::create_dir_all(&dir)?;

    // a channel of low conductivity through the middle of the domain
    let n = 16;
    let values = (0..n * n)
        .map(|k| if (6..10).contains(&(k / n)) { 0.02 } else { 1.0 })
        .collect();
    let raster = Raster::new(n, n, values)?;
    let path = dir.join("channel.txt");
    fs::write(&path, raster.to_text())?;
    assert_eq!(load_raster(&path)?, raster);

    let config = format!(
        "coarse_exponents = [2, 3]\nfine_exponent = 5\nb = [4.0, 0.0]\n\n\
         [coefficient]\nkind = \"raster\"\npath = \"{}\"\n",
        path.display()
    );
    let cfg = ExperimentConfig::parse(&config, None)?;
    let report = run_convergence(&cfg)?;
    for row in &report.rows {
        println!("H={:<6} error {:.4e}", row.coarse_h, row.rel_error);
    }
    Ok(())
}
