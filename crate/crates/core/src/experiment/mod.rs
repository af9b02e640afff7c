//! Convergence, decay and single-run experiments driven by [`ExperimentConfig`],
//! with CSV, VTK and config outputs.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

pub use config::{CoefficientSpec, ElementSpec, ExperimentConfig, Forcing, ModeSpec, PatchLayers};

use crate::coeff::CoefficientField;
use crate::dg::{assemble_load, solve_with, vtk, DGSpace, DgOperators};
use crate::error::{Error, Result};
use crate::lod::{
    build_projection, corrector_decay_profile, fit_decay_rate, run_multiscale, CoarseProjection, Layers,
};
use crate::mesh::{MeshHierarchy, MeshLevel};

pub const CONVERGENCE_HEADER: &str =
    "H,N_dof,L,rel_energy_error,energy_error_diff_part,energy_error_conv_part,wall_seconds";
pub const DECAY_HEADER: &str = "L,energy_distance";

/// Least-squares slope of `y` against `x`; `None` for fewer than two points
/// or degenerate `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fine-level data shared by every coarse level of one experiment.
pub struct FineProblem {
    pub mesh: MeshLevel,
    pub field: CoefficientField,
    pub ops: DgOperators,
    pub load: Vec<f64>,
    pub reference: Vec<f64>,
}

impl FineProblem {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let mesh = MeshLevel::new(cfg.fine_n())?;
        let field = cfg.field()?;
        let space = DGSpace::new(&mesh);
        let assembly = cfg.assembly();
        let ops = DgOperators::assemble(&space, &field, &assembly).map_err(|e| e.at_stage("assembly"))?;
        let forcing = cfg.forcing;
        let load = assemble_load(&space, &move |x, y| forcing.eval(x, y), &assembly).into_inner();
        let reference = solve_with(&ops, &load)
            .map_err(|e| e.at_stage("reference solve"))?
            .into_inner();
        Ok(Self {
            mesh,
            field,
            ops,
            load,
            reference,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub coarse_h: f64,
    /// coarse unknowns, `4 N_H^2`
    pub coarse_dofs: usize,
    pub layers: Layers,
    pub rel_error: f64,
    /// diffusion part of the error norm, relative to the reference norm
    pub diff_part: f64,
    /// convection part of the error norm, relative to the reference norm
    pub conv_part: f64,
    pub wall_seconds: f64,
    /// `H |b|_inf / alpha`
    pub convection_ratio: f64,
}

impl ConvergenceRow {
    fn csv_line(&self, with_time: bool) -> String {
        let layers = match self.layers {
            Layers::Ideal => "ideal".to_string(),
            Layers::Local(l) => l.to_string(),
        };
        let wall = if with_time {
            format!("{:.3}", self.wall_seconds)
        } else {
            "NA".to_string()
        };
        format!(
            "{},{},{},{},{},{},{}",
            self.coarse_h,
            self.coarse_dofs,
            layers,
            number(self.rel_error),
            number(self.diff_part),
            number(self.conv_part),
            wall
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// fitted slope of `log(error)` against `log(N_dof)`
    pub slope: Option<f64>,
}

impl ConvergenceReport {
    pub fn to_csv(&self, with_time: bool) -> String {
        let mut out = format!("{CONVERGENCE_HEADER}\n");
        for row in &self.rows {
            out.push_str(&row.csv_line(with_time));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        match self.slope {
            Some(s) => format!("slope={s:e}\n"),
            None => "slope=NA\n".to_string(),
        }
    }

    pub fn write(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
        write_files(
            dir,
            cfg,
            &[
                ("convergence.csv", self.to_csv(cfg.record_wall_time)),
                ("convergence_summary.txt", self.summary()),
            ],
        )
    }
}

fn level_row(
    fine: &FineProblem,
    hier: &MeshHierarchy,
    proj: &CoarseProjection,
    cfg: &ExperimentConfig,
    layers: Layers,
) -> Result<(ConvergenceRow, Vec<f64>)> {
    let start = Instant::now();
    let run = run_multiscale(hier, &fine.ops, proj, &fine.load, layers, cfg.mode())?;
    let wall_seconds = start.elapsed().as_secs_f64();
    // a zero reference leaves the relative columns undefined (NaN)
    let denom = fine.ops.energy_norm(&fine.reference)?;
    let diff: Vec<f64> = fine
        .reference
        .iter()
        .zip(run.solution.fine_representation.iter())
        .map(|(a, b)| a - b)
        .collect();
    let (d, c) = fine.ops.energy_norm_parts(&diff);
    let coarse_h = hier.coarse().cell_size();
    let row = ConvergenceRow {
        coarse_h,
        coarse_dofs: run.coarse_dofs,
        layers,
        rel_error: fine.ops.energy_norm(&diff)? / denom,
        diff_part: d / denom,
        conv_part: c / denom,
        wall_seconds,
        convection_ratio: fine.field.convection_ratio(coarse_h),
    };
    Ok((row, run.solution.fine_representation.into_inner()))
}

fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        "NA".to_string()
    }
}

/// Multiscale error against the fine reference for every configured `H`.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let fine = FineProblem::new(cfg)?;
    let mut rows = Vec::with_capacity(cfg.coarse_exponents.len());
    for &i in &cfg.coarse_exponents {
        let hier = cfg.hierarchy(i)?;
        let proj = build_projection(&hier);
        let (row, _) = level_row(&fine, &hier, &proj, cfg, cfg.layers_for(i))?;
        if row.rel_error.is_nan() {
            return Err(Error::ZeroReferenceNorm);
        }
        rows.push(row);
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.coarse_dofs as f64).ln(), r.rel_error.ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    Ok(ConvergenceReport { rows, slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub coarse_h: f64,
    pub element: usize,
    /// `(patch layers, energy distance to the ideal corrector)`
    pub profile: Vec<(usize, f64)>,
    pub gamma: Option<f64>,
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{DECAY_HEADER}\n");
        for (l, d) in &self.profile {
            let _ = writeln!(out, "{l},{d:e}");
        }
        out
    }

    pub fn summary(&self) -> String {
        let gamma = self.gamma.map_or("NA".to_string(), |g| format!("{g:e}"));
        format!("H={}\nelement={}\ngamma={gamma}\n", self.coarse_h, self.element)
    }

    pub fn write(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
        write_files(
            dir,
            cfg,
            &[
                ("decay.csv", self.to_csv()),
                ("decay_summary.txt", self.summary()),
            ],
        )
    }
}

/// Distance below which a corrector counts as reproduced exactly.
pub const DECAY_FLOOR: f64 = 1e-10;

/// Corrector decay for one coarse element; needs exactly one coarse level.
pub fn run_decay(cfg: &ExperimentConfig) -> Result<DecayReport> {
    cfg.validate()?;
    let &[i] = cfg.coarse_exponents.as_slice() else {
        return Err(Error::Config(
            "the decay study takes exactly one coarse exponent".into(),
        ));
    };
    let hier = cfg.hierarchy(i)?;
    let mesh = hier.fine();
    let field = cfg.field()?;
    let ops = DgOperators::assemble(&DGSpace::new(mesh), &field, &cfg.assembly())
        .map_err(|e| e.at_stage("assembly"))?;
    let proj = build_projection(&hier);
    let element = cfg.decay_cell(hier.coarse().n())?;
    let layers = cfg
        .decay_layers
        .clone()
        .unwrap_or_else(|| (0..=hier.coarse().n()).collect());
    let profile = corrector_decay_profile(&hier, &ops, &proj, element, &layers, cfg.mode())
        .map_err(|e| e.at_stage("decay profile"))?;
    let scale = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    let gamma = fit_decay_rate(&profile, DECAY_FLOOR * scale.max(f64::MIN_POSITIVE));
    Ok(DecayReport {
        coarse_h: hier.coarse().cell_size(),
        element,
        profile,
        gamma,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleReport {
    pub row: ConvergenceRow,
    pub reference_norm: f64,
    pub multiscale_norm: f64,
    pub reference: Vec<f64>,
    pub multiscale: Vec<f64>,
    pub fine_n: usize,
}

impl SingleReport {
    pub fn summary(&self) -> String {
        format!(
            "reference_energy_norm={:e}\nmultiscale_energy_norm={:e}\nrel_energy_error={}\nconvection_ratio={}\n",
            self.reference_norm,
            self.multiscale_norm,
            number(self.row.rel_error),
            self.row.convection_ratio
        )
    }

    /// Writes cell averages of the reference, multiscale and difference fields
    /// as VTK, plus the CSV row and summary.
    pub fn write(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
        let mesh = MeshLevel::new(self.fine_n)?;
        let space = DGSpace::new(&mesh);
        let reference = space.cell_averages(&self.reference);
        let multiscale = space.cell_averages(&self.multiscale);
        let difference: Vec<f64> = reference.iter().zip(&multiscale).map(|(a, b)| a - b).collect();
        let table = ConvergenceReport {
            rows: vec![self.row.clone()],
            slope: None,
        };
        write_files(
            dir,
            cfg,
            &[
                ("single.csv", table.to_csv(cfg.record_wall_time)),
                ("single_summary.txt", self.summary()),
                (
                    "reference.vtk",
                    vtk::render(&mesh, "reference", &[("u", &reference)])?,
                ),
                (
                    "multiscale.vtk",
                    vtk::render(&mesh, "multiscale", &[("u", &multiscale)])?,
                ),
                (
                    "difference.vtk",
                    vtk::render(&mesh, "difference", &[("u", &difference)])?,
                ),
            ],
        )
    }
}

/// One multiscale solve at the first configured coarse level.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SingleReport> {
    cfg.validate()?;
    let i = cfg.coarse_exponents[0];
    let fine = FineProblem::new(cfg)?;
    let hier = cfg.hierarchy(i)?;
    let proj = build_projection(&hier);
    let (row, multiscale) = level_row(&fine, &hier, &proj, cfg, cfg.layers_for(i))?;
    Ok(SingleReport {
        reference_norm: fine.ops.energy_norm(&fine.reference)?,
        multiscale_norm: fine.ops.energy_norm(&multiscale)?,
        row,
        reference: fine.reference,
        multiscale,
        fine_n: cfg.fine_n(),
    })
}

fn write_files(dir: &Path, cfg: &ExperimentConfig, files: &[(&str, String)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let config_path = dir.join("config.toml");
    fs::write(&config_path, cfg.to_toml()).map_err(|e| Error::io(&config_path, e))?;
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
