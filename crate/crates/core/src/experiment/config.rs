//! Experiment configuration, read from a TOML key-value file.
//!
//! ```toml
//! coarse_exponents = [2, 3, 4]   # H = 2^-i
//! fine_exponent = 6              # h = 2^-k
//! b = [32.0, 0.0]
//! patch_growth = 2.0             # L = ceil(growth * log_base(1/H))
//! log_base = 2.0
//! patch_layers = "auto"          # "auto" | "ideal" | <integer>
//! sigma_scale = 10.0
//! load_points = 4
//! corrector_mode = "convective"  # "convective" | "diffusion-only"
//! forcing = "cosine"             # "cosine" | "one" | "zero"
//! output_dir = "out"
//! seed = 0
//! record_wall_time = false
//! decay_element = "center"       # "center" | [ix, iy]
//!
//! [coefficient]
//! kind = "constant"              # constant | layered | highcontrast | raster
//! value = 1.0
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coeff::{load_raster, make_highcontrast, make_layered, CoefficientField, Raster};
use crate::dg::AssemblyConfig;
use crate::error::{Error, Result};
use crate::lod::{CorrectorMode, Layers};
use crate::mesh::{patch_layers_for, MeshHierarchy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    Layered {
        resolution: usize,
        hi: f64,
        lo: f64,
    },
    /// Synthetic log-uniform field; the seed comes from the experiment seed.
    Highcontrast {
        resolution: usize,
        alpha_floor: f64,
        contrast: f64,
    },
    Raster {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatchLayers {
    Count(usize),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Keyword(String),
    Cell([usize; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Forcing {
    /// `1 + cos(2 pi x) cos(2 pi y)`
    Cosine,
    One,
    Zero,
}

impl Forcing {
    pub fn eval(self, x: f64, y: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            Forcing::Cosine => 1.0 + (2.0 * PI * x).cos() * (2.0 * PI * y).cos(),
            Forcing::One => 1.0,
            Forcing::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    Convective,
    DiffusionOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub coarse_exponents: Vec<u32>,
    pub fine_exponent: u32,
    pub b: [f64; 2],
    pub patch_growth: f64,
    pub log_base: f64,
    pub patch_layers: PatchLayers,
    pub sigma_scale: f64,
    pub load_points: usize,
    pub corrector_mode: ModeSpec,
    pub forcing: Forcing,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub record_wall_time: bool,
    pub decay_element: ElementSpec,
    /// Patch sizes for the decay study; defaults to `0..=N_H`.
    pub decay_layers: Option<Vec<usize>>,
    pub coefficient: CoefficientSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            coarse_exponents: vec![2, 3, 4],
            fine_exponent: 6,
            b: [32.0, 0.0],
            patch_growth: 2.0,
            log_base: 2.0,
            patch_layers: PatchLayers::Keyword("auto".into()),
            sigma_scale: 10.0,
            load_points: 4,
            corrector_mode: ModeSpec::Convective,
            forcing: Forcing::Cosine,
            output_dir: PathBuf::from("out"),
            seed: 0,
            record_wall_time: false,
            decay_element: ElementSpec::Keyword("center".into()),
            decay_layers: None,
            coefficient: CoefficientSpec::Constant { value: 1.0 },
        }
    }
}

impl ExperimentConfig {
    /// Parses a config; relative raster paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let (CoefficientSpec::Raster { path }, Some(base)) = (&mut cfg.coefficient, base_dir) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let max = self
            .coarse_exponents
            .iter()
            .copied()
            .max()
            .ok_or_else(|| Error::Config("coarse_exponents is empty".into()))?;
        if self.fine_exponent < max {
            return Err(Error::Config(format!(
                "fine_exponent {} is below the largest coarse exponent {max}",
                self.fine_exponent
            )));
        }
        if self.fine_exponent > 12 {
            return Err(Error::Config(format!(
                "fine_exponent {} is too large",
                self.fine_exponent
            )));
        }
        if self.sigma_scale.is_nan() || self.sigma_scale <= 0.0 {
            return Err(Error::Config("sigma_scale must be positive".into()));
        }
        if !(self.log_base.is_finite()
            && self.log_base > 1.0
            && self.patch_growth.is_finite()
            && self.patch_growth >= 0.0)
        {
            return Err(Error::Config("need log_base > 1 and patch_growth >= 0".into()));
        }
        if self.load_points == 0 {
            return Err(Error::Config("load_points must be positive".into()));
        }
        if !self.b.iter().all(|v| v.is_finite()) {
            return Err(Error::Config("b must be finite".into()));
        }
        if let PatchLayers::Keyword(k) = &self.patch_layers {
            if k != "auto" && k != "ideal" {
                return Err(Error::Config(format!(
                    "patch_layers `{k}`: expected auto, ideal or a count"
                )));
            }
        }
        if let ElementSpec::Keyword(k) = &self.decay_element {
            if k != "center" {
                return Err(Error::Config(format!(
                    "decay_element `{k}`: expected center or [ix, iy]"
                )));
            }
        }
        if let CoefficientSpec::Raster { path } = &self.coefficient {
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "raster file {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn fine_n(&self) -> usize {
        1 << self.fine_exponent
    }

    pub fn assembly(&self) -> AssemblyConfig {
        AssemblyConfig {
            sigma_scale: self.sigma_scale,
            load_points: self.load_points,
        }
    }

    pub fn mode(&self) -> CorrectorMode {
        match self.corrector_mode {
            ModeSpec::Convective => CorrectorMode::Convective,
            ModeSpec::DiffusionOnly => CorrectorMode::DiffusionOnly,
        }
    }

    pub fn raster(&self) -> Result<Raster> {
        match &self.coefficient {
            CoefficientSpec::Constant { value } => Raster::constant(*value),
            CoefficientSpec::Layered { resolution, hi, lo } => make_layered(*resolution, *hi, *lo),
            CoefficientSpec::Highcontrast {
                resolution,
                alpha_floor,
                contrast,
            } => make_highcontrast(*resolution, self.seed, *alpha_floor, *contrast),
            CoefficientSpec::Raster { path } => load_raster(path),
        }
    }

    pub fn field(&self) -> Result<CoefficientField> {
        Ok(CoefficientField::new(self.raster()?, self.b))
    }

    /// Patch layers for a coarse level `H = 2^-i`.
    pub fn layers_for(&self, coarse_exponent: u32) -> Layers {
        match &self.patch_layers {
            PatchLayers::Count(l) => Layers::Local(*l),
            PatchLayers::Keyword(k) if k == "ideal" => Layers::Ideal,
            PatchLayers::Keyword(_) => {
                if coarse_exponent == 0 {
                    return Layers::Local(0);
                }
                let h = 0.5f64.powi(coarse_exponent as i32);
                Layers::Local(patch_layers_for(h, self.patch_growth, self.log_base))
            }
        }
    }

    pub fn hierarchy(&self, coarse_exponent: u32) -> Result<MeshHierarchy> {
        MeshHierarchy::new(1 << coarse_exponent, self.fine_n())
    }

    /// Coarse element for the decay study on an `n x n` coarse mesh.
    pub fn decay_cell(&self, n: usize) -> Result<usize> {
        match self.decay_element {
            ElementSpec::Keyword(_) => Ok((n / 2) * n + n / 2),
            ElementSpec::Cell([ix, iy]) if ix < n && iy < n => Ok(iy * n + ix),
            ElementSpec::Cell([ix, iy]) => Err(Error::Config(format!(
                "decay element ({ix}, {iy}) outside the {n}x{n} coarse mesh"
            ))),
        }
    }
}
