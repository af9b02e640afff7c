//! Piecewise-constant scalar diffusion on a raster and constant convection.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::MeshLevel;

/// Cell-centered grid of positive values over `[0, 1]^2`.
///
/// `values[j * nx + i]` is the cell at `x in [i/nx, (i+1)/nx)`, `y in [j/ny, (j+1)/ny)`;
/// row `j = 0` is the bottom row.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl Raster {
    pub fn new(nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Coefficient("raster dimensions must be positive".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::Dimension {
                expected: nx * ny,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::Coefficient(format!(
                "value {} at row {}, column {} is not a positive finite number",
                values[pos],
                pos / nx,
                pos % nx
            )));
        }
        Ok(Self { nx, ny, values })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(1, 1, vec![value])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Plain-text form: `nx ny` on the first line, then `ny` rows bottom first.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.nx, self.ny);
        for row in self.values.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

pub fn load_raster(path: impl AsRef<Path>) -> Result<Raster> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_raster(&text).map_err(|(line, msg)| Error::RasterParse {
        path: path.to_path_buf(),
        line,
        msg,
    })
}

fn parse_raster(text: &str) -> std::result::Result<Raster, (usize, String)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or((1, "empty file".to_string()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| (hline, format!("bad header `{header}`: {e}")))?;
    let [nx, ny] = dims[..] else {
        return Err((hline, format!("header must be `nx ny`, got `{header}`")));
    };
    if nx == 0 || ny == 0 {
        return Err((hline, "raster dimensions must be positive".into()));
    }

    let mut values = Vec::with_capacity(nx * ny);
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == ny {
            return Err((lineno, format!("more than {ny} data rows")));
        }
        let start = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|e| (lineno, format!("bad value `{tok}`: {e}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err((lineno, format!("value {v} is not positive")));
            }
            values.push(v);
        }
        if values.len() - start != nx {
            return Err((
                lineno,
                format!("expected {nx} values, found {}", values.len() - start),
            ));
        }
        rows += 1;
    }
    if rows != ny {
        return Err((hline, format!("expected {ny} data rows, found {rows}")));
    }
    Ok(Raster { nx, ny, values })
}

/// `n x n` raster whose rows alternate `hi`, `lo`, `hi`, ... from the bottom.
pub fn make_layered(n: usize, hi: f64, lo: f64) -> Result<Raster> {
    let values = (0..n)
        .flat_map(|j| std::iter::repeat_n(if j % 2 == 0 { hi } else { lo }, n))
        .collect();
    Raster::new(n, n, values)
}

/// Deterministic log-uniform random field in `[alpha_floor, alpha_floor * contrast]`.
pub fn make_highcontrast(n: usize, seed: u64, alpha_floor: f64, contrast: f64) -> Result<Raster> {
    if contrast.is_nan() || contrast < 1.0 {
        return Err(Error::Coefficient(format!(
            "contrast {contrast} must be at least 1"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_contrast = contrast.ln();
    let values = (0..n * n)
        .map(|_| {
            let u: f64 = rng.gen();
            (alpha_floor * (u * log_contrast).exp()).clamp(alpha_floor, alpha_floor * contrast)
        })
        .collect();
    Raster::new(n, n, values)
}

/// Scalar diffusion raster together with a constant (hence divergence-free)
/// convection vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    raster: Raster,
    b: [f64; 2],
    alpha: f64,
    beta: f64,
}

impl CoefficientField {
    pub fn new(raster: Raster, b: [f64; 2]) -> Self {
        let alpha = raster.min();
        let beta = raster.max();
        Self {
            raster,
            b,
            alpha,
            beta,
        }
    }

    pub fn constant(a: f64, b: [f64; 2]) -> Result<Self> {
        Ok(Self::new(Raster::constant(a)?, b))
    }

    pub fn raster(&self) -> &Raster {
        &self.raster
    }

    pub fn b(&self) -> [f64; 2] {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same diffusion with a different convection vector.
    pub fn with_b(&self, b: [f64; 2]) -> Self {
        Self { b, ..self.clone() }
    }

    /// Whether raster cell boundaries are also cell boundaries of `mesh`.
    pub fn check_resolved_by(&self, mesh: &MeshLevel) -> Result<()> {
        let n = mesh.n();
        if !n.is_multiple_of(self.raster.nx) || !n.is_multiple_of(self.raster.ny) {
            return Err(Error::Coefficient(format!(
                "a {n}x{n} mesh does not resolve a {}x{} raster",
                self.raster.nx, self.raster.ny
            )));
        }
        Ok(())
    }

    /// Diffusion value on a cell of `mesh`.
    pub fn eval_a(&self, mesh: &MeshLevel, cell: usize) -> Result<f64> {
        self.check_resolved_by(mesh)?;
        Ok(self.lookup(mesh, cell))
    }

    /// Diffusion value for every cell of `mesh`.
    pub fn cell_values(&self, mesh: &MeshLevel) -> Result<Vec<f64>> {
        self.check_resolved_by(mesh)?;
        Ok((0..mesh.num_cells()).map(|e| self.lookup(mesh, e)).collect())
    }

    fn lookup(&self, mesh: &MeshLevel, cell: usize) -> f64 {
        let c = mesh.cell(cell);
        let i = c.ix * self.raster.nx / mesh.n();
        let j = c.iy * self.raster.ny / mesh.n();
        self.raster.get(i, j)
    }

    /// `||H b||_inf / alpha`, the size of convection relative to diffusion on
    /// the coarse scale.
    pub fn convection_ratio(&self, coarse_h: f64) -> f64 {
        coarse_h * self.b[0].abs().max(self.b[1].abs()) / self.alpha
    }
}
