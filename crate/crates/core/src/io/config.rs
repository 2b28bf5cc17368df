//! Run configuration: a JSON document plus `key=value` overrides, validated
//! in full before any computation starts.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::render::{slice_plane, SliceSpec};
use crate::error::{QdsmError, Result};
use crate::field::FieldPart;
use crate::forward::ForwardModel;
use crate::geometry::{
    fibonacci_sphere_directions, make_wavenumbers, uniform_circle_directions, Dim, DirectionSet, MeasurementGeometry,
    Point, SamplingGrid, WavenumberSet,
};
use crate::phantoms::{self, ContrastPhantom};

/// Largest forward grid (points per axis) the dense Lippmann–Schwinger solver accepts.
pub const LS_MAX_COUNT_2D: usize = 64;
pub const LS_MAX_COUNT_3D: usize = 24;

fn default_amplitude() -> Complex64 {
    Complex64::new(0.01, 0.0)
}
fn default_decay() -> f64 {
    100.0
}
fn default_sl_scale() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PhantomSpec {
    Zero,
    GaussianBump {
        /// `[re, im]`
        #[serde(default = "default_amplitude")]
        amplitude: Complex64,
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "default_decay")]
        decay: f64,
    },
    #[serde(rename = "complex_mountain_2d")]
    ComplexMountain2d,
    #[serde(rename = "cross_3d")]
    Cross3d {
        #[serde(default)]
        hollow: bool,
    },
    #[serde(rename = "smooth_3d")]
    Smooth3d {
        scale: f64,
    },
    #[serde(rename = "shepp_logan_2d")]
    SheppLogan2d {
        #[serde(default = "default_sl_scale")]
        scale: f64,
    },
    #[serde(rename = "blocks_sparse_2d")]
    BlocksSparse2d,
}

impl PhantomSpec {
    pub fn build(&self, dim: Dim) -> Result<ContrastPhantom> {
        let need = |want: Dim| -> Result<()> {
            if want == dim {
                Ok(())
            } else {
                Err(QdsmError::DimensionMismatch {
                    expected: dim.value(),
                    found: want.value(),
                })
            }
        };
        match self {
            PhantomSpec::Zero => Ok(phantoms::zero(dim)),
            PhantomSpec::GaussianBump {
                amplitude,
                center,
                decay,
            } => {
                let mut c: Point = [0.0; 3];
                if !center.is_empty() {
                    if center.len() != dim.value() {
                        return Err(QdsmError::domain(format!(
                            "center needs {} coordinates, got {}",
                            dim.value(),
                            center.len()
                        )));
                    }
                    c[..center.len()].copy_from_slice(center);
                }
                phantoms::gaussian_bump(dim, *amplitude, c, *decay)
            }
            PhantomSpec::ComplexMountain2d => {
                need(Dim::Two)?;
                Ok(phantoms::complex_mountain_2d())
            }
            PhantomSpec::Cross3d { hollow } => {
                need(Dim::Three)?;
                Ok(phantoms::cross_3d(*hollow))
            }
            PhantomSpec::Smooth3d { scale } => {
                need(Dim::Three)?;
                phantoms::smooth_3d(*scale)
            }
            PhantomSpec::SheppLogan2d { scale } => {
                need(Dim::Two)?;
                phantoms::shepp_logan_2d(*scale)
            }
            PhantomSpec::BlocksSparse2d => {
                need(Dim::Two)?;
                Ok(phantoms::blocks_sparse_2d())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavenumberSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
}

/// The cube `[min, max]^dim` with `count` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn build(&self, dim: Dim) -> Result<SamplingGrid> {
        SamplingGrid::cube(dim, self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardSpec {
    pub model: ForwardModel,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub phantom: PhantomSpec,
    pub dim: Dim,
    pub geometry: MeasurementGeometry,
    /// N_θ in 2D, the Fibonacci lattice size L in 3D.
    pub directions: usize,
    pub wavenumbers: WavenumberSpec,
    pub forward: ForwardSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub sampling: GridSpec,
    pub output_dir: PathBuf,
    /// Input data for `invert`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurements: Option<PathBuf>,
    /// Slices to render; empty selects the defaults for the dimension.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slices: Vec<SliceSpec>,
}

/// Everything a run needs, built from a validated [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Plan {
    pub phantom: ContrastPhantom,
    pub geometry: MeasurementGeometry,
    pub directions: DirectionSet,
    pub wavenumbers: WavenumberSet,
    pub forward_grid: SamplingGrid,
    pub model: ForwardModel,
    pub noise: NoiseSpec,
    pub sampling_grid: SamplingGrid,
    pub slices: Vec<SliceSpec>,
}

fn config_err(field: &str, e: impl std::fmt::Display) -> QdsmError {
    QdsmError::Config(format!("{field}: {e}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QdsmError::Config(e.to_string()))
    }

    /// Reads `path`, applies `key=value` overrides (dotted keys, JSON or bare
    /// string values) and deserializes.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QdsmError::Config(format!("{}: {e}", path.display())))?;
        let mut value: Value =
            serde_json::from_str(&text).map_err(|e| QdsmError::Config(format!("{}: {e}", path.display())))?;
        apply_overrides(&mut value, overrides)?;
        serde_json::from_value(value).map_err(|e| QdsmError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every downstream precondition and builds the run objects.
    pub fn plan(&self) -> Result<Plan> {
        let dim = self.dim;
        let phantom = self.phantom.build(dim).map_err(|e| config_err("phantom", e))?;
        let support = phantom.support_radius();

        if let MeasurementGeometry::NearField { radius } = self.geometry {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(config_err("geometry.radius", format!("must be positive, got {radius}")));
            }
        }
        self.geometry.check_encloses(support).map_err(|e| config_err("geometry.radius", e))?;

        let directions = match dim {
            Dim::Two => uniform_circle_directions(self.directions),
            Dim::Three => fibonacci_sphere_directions(self.directions),
        }
        .map_err(|e| config_err("directions", e))?;

        let w = self.wavenumbers;
        let wavenumbers = make_wavenumbers(w.k_min, w.k_max, w.n_k).map_err(|e| config_err("wavenumbers", e))?;

        let forward_grid = self.forward.grid.build(dim).map_err(|e| config_err("forward.grid", e))?;
        if !forward_grid.contains_ball(support) {
            return Err(config_err(
                "forward.grid",
                format!("must contain the phantom support ball of radius {support}"),
            ));
        }
        if self.forward.model == ForwardModel::LippmannSchwinger {
            let cap = match dim {
                Dim::Two => LS_MAX_COUNT_2D,
                Dim::Three => LS_MAX_COUNT_3D,
            };
            if self.forward.grid.count > cap {
                return Err(config_err(
                    "forward.grid.count",
                    format!("the dense solver accepts at most {cap} points per axis in {dim}"),
                ));
            }
            if let MeasurementGeometry::NearField { radius } = self.geometry {
                let reach = forward_grid.bounding_radius();
                if radius <= reach {
                    return Err(config_err(
                        "geometry.radius",
                        format!("point sources must lie outside the forward grid (radius {reach})"),
                    ));
                }
            }
        }

        if !(self.noise.delta >= 0.0 && self.noise.delta.is_finite()) {
            return Err(config_err("noise.delta", format!("must be nonnegative, got {}", self.noise.delta)));
        }

        let sampling_grid = self.sampling.build(dim).map_err(|e| config_err("sampling", e))?;
        if self.output_dir.as_os_str().is_empty() {
            return Err(config_err("output_dir", "must not be empty"));
        }

        let slices = if self.slices.is_empty() {
            default_slices(&sampling_grid)
        } else {
            self.slices.clone()
        };
        for (i, s) in slices.iter().enumerate() {
            slice_plane(&sampling_grid, s).map_err(|e| config_err(&format!("slices[{i}]"), e))?;
        }

        Ok(Plan {
            phantom,
            geometry: self.geometry,
            directions,
            wavenumbers,
            forward_grid,
            model: self.forward.model,
            noise: self.noise,
            sampling_grid,
            slices,
        })
    }
}

/// Re and Im of the whole plane in 2D; Re on the three central planes in 3D.
pub fn default_slices(grid: &SamplingGrid) -> Vec<SliceSpec> {
    match grid.dim() {
        Dim::Two => vec![
            SliceSpec {
                part: FieldPart::Re,
                axis: 0,
                coordinate: 0.0,
            },
            SliceSpec {
                part: FieldPart::Im,
                axis: 0,
                coordinate: 0.0,
            },
        ],
        Dim::Three => (0..3)
            .map(|a| SliceSpec {
                part: FieldPart::Re,
                axis: a,
                coordinate: grid.coord(a, grid.counts()[a] / 2),
            })
            .collect(),
    }
}

/// Applies `a.b.c=value` assignments to a JSON tree.
pub fn apply_overrides(value: &mut Value, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| QdsmError::Config(format!("override `{item}` is not key=value")))?;
        let parsed: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut cursor = &mut *value;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(QdsmError::Config(format!("override key `{key}` has an empty segment")));
            }
            if !cursor.is_object() {
                *cursor = Value::Object(Default::default());
            }
            let map = cursor.as_object_mut().expect("object");
            if i + 1 == parts.len() {
                map.insert(part.to_string(), parsed.clone());
                break;
            }
            cursor = map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
        }
    }
    Ok(())
}
