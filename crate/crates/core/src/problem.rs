//! JSON problem files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldModel, VectorField};
use crate::poly::Poly;
use crate::rhs::{Builtin, GridSampled, GrowthMode, Rhs, SobolevParams};
use crate::spectral::{Perturbation, PicardConfig, PicardGridOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub field: VectorField,
    #[serde(default)]
    pub rhs: RhsSpec,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub sobolev: SobolevParams,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub curves: CurveOptions,
    #[serde(default)]
    pub samples: SampleGrid,
    /// Random interior probes for residual checks.
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    #[serde(default)]
    pub picard: PicardConfig,
    #[serde(default)]
    pub picard_grid: PicardGridOptions,
    #[serde(default)]
    pub outputs: OutputPaths,
}

fn default_probes() -> usize {
    500
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))
    }

    pub fn model(&self) -> Result<FieldModel> {
        FieldModel::new(self.field.clone())
    }

    pub fn rhs(&self) -> Result<Rhs> {
        self.rhs.build()
    }
}

/// Serialisable description of a right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsSpec {
    Constant {
        value: f64,
    },
    /// `Σ_ℓ coeffs[ℓ](t) x^ℓ`.
    PolyInX {
        coeffs: Vec<Poly>,
    },
    Builtin {
        function: Builtin,
        /// Declared rate; defaults to the builtin's natural rate.
        #[serde(default)]
        eps: Option<f64>,
        #[serde(default)]
        mode: Option<GrowthMode>,
    },
    Grid {
        t: Vec<f64>,
        x: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl Default for RhsSpec {
    fn default() -> Self {
        RhsSpec::Constant { value: 1.0 }
    }
}

impl RhsSpec {
    pub fn build(&self) -> Result<Rhs> {
        match self {
            RhsSpec::Constant { value } => Ok(Rhs::constant(*value)),
            RhsSpec::PolyInX { coeffs } => Rhs::poly_in_x(coeffs.clone()),
            RhsSpec::Builtin { function, eps, mode } => {
                let mode = mode.unwrap_or(match function {
                    Builtin::GaussianX { .. } => GrowthMode::Decay,
                    _ => GrowthMode::Growth,
                });
                Rhs::builtin(*function, eps.unwrap_or(function.natural_rate()), mode)
            }
            RhsSpec::Grid { t, x, values } => {
                let sorted = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
                if !sorted(t) || !sorted(x) {
                    return Err(Error::InvalidInput("grid axes must be strictly increasing".into()));
                }
                if values.len() != t.len() || values.iter().any(|r| r.len() != x.len()) {
                    return Err(Error::InvalidInput("grid values do not match the axes".into()));
                }
                Ok(Rhs::Grid(GridSampled {
                    t: t.clone(),
                    x: x.clone(),
                    values: values.clone(),
                }))
            }
        }
    }

    /// The constant value, when the right-hand side is a constant.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            RhsSpec::Constant { value } => Some(*value),
            RhsSpec::Builtin {
                function: Builtin::Constant { c },
                ..
            } => Some(*c),
            _ => None,
        }
    }
}

/// Sampling window `|t| ≤ t`, `|x| ≤ x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Window {
    pub t: f64,
    pub x: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window { t: 2.0, x: 4.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual: f64,
    pub weak: f64,
    pub flux: f64,
    pub closed_form: f64,
    pub picard_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-6,
            weak: 5e-4,
            flux: 1e-4,
            closed_form: 1e-7,
            picard_residual: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveOptions {
    pub seeds: Vec<f64>,
    pub samples: usize,
    pub clip_x: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            seeds: (-4..=4).map(|i| 0.5 * i as f64).collect(),
            samples: 200,
            clip_x: 6.0,
        }
    }
}

/// Tensor grid for CSV solution samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleGrid {
    pub nt: usize,
    pub nx: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid { nt: 41, nx: 21 }
    }
}

/// File names, relative to the output directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    /// Defaults to `<command>.json`.
    pub report: Option<String>,
    /// Defaults to `<command>.csv`.
    pub csv: Option<String>,
    /// Defaults to `curves.svg`.
    pub svg: Option<String>,
}
