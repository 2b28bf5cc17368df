//! Synthetic backscattering measurements.

mod born;
pub mod krylov;
mod ls;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QdsmError, Result};
use crate::field::ComplexField;
use crate::geometry::{DirectionSet, MeasurementGeometry, Point, SamplingGrid, WavenumberSet};
use crate::phantoms::{rasterize, ContrastPhantom};

pub use born::{born_far_backscatter, born_far_matrix, born_near_backscatter, born_near_matrix};
pub use ls::{ls_backscatter, ls_residual, ls_total_field, Incident, LSDiscretization, LSOperator, LSSolution, RESIDUAL_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardModel {
    Born,
    #[serde(alias = "ls")]
    LippmannSchwinger,
}

/// Backscattering data `data[j·N_k + m]` for direction j and wavenumber m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    geometry: MeasurementGeometry,
    directions: DirectionSet,
    wavenumbers: WavenumberSet,
    data: Vec<Complex64>,
    noise_level: f64,
    seed: Option<u64>,
}

impl MeasurementSet {
    pub fn new(
        geometry: MeasurementGeometry,
        directions: DirectionSet,
        wavenumbers: WavenumberSet,
        data: Vec<Complex64>,
    ) -> Result<Self> {
        if data.len() != directions.len() * wavenumbers.len() {
            return Err(QdsmError::domain(format!(
                "data has {} entries, expected {} directions x {} wavenumbers",
                data.len(),
                directions.len(),
                wavenumbers.len()
            )));
        }
        if let MeasurementGeometry::NearField { radius } = geometry {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(QdsmError::domain(format!(
                    "near-field radius must be positive, got {radius}"
                )));
            }
        }
        Ok(Self {
            geometry,
            directions,
            wavenumbers,
            data,
            noise_level: 0.0,
            seed: None,
        })
    }

    /// Fills the matrix from an analytic datum `f(θ_j, k_m)`.
    pub fn from_closure(
        geometry: MeasurementGeometry,
        directions: DirectionSet,
        wavenumbers: WavenumberSet,
        f: impl Fn(&Point, f64) -> Complex64 + Sync,
    ) -> Result<Self> {
        let ks = wavenumbers.values();
        let data: Vec<Complex64> = directions
            .dirs()
            .par_iter()
            .flat_map_iter(|theta| ks.iter().map(|&k| f(theta, k)).collect::<Vec<_>>())
            .collect();
        Self::new(geometry, directions, wavenumbers, data)
    }

    pub fn geometry(&self) -> &MeasurementGeometry {
        &self.geometry
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn wavenumbers(&self) -> &WavenumberSet {
        &self.wavenumbers
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn n_theta(&self) -> usize {
        self.directions.len()
    }

    pub fn n_k(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn at(&self, j: usize, m: usize) -> Complex64 {
        self.data[j * self.n_k() + m]
    }

    pub fn noise_level(&self) -> f64 {
        self.noise_level
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The same acquisition with different data.
    pub fn with_data(&self, data: Vec<Complex64>) -> Result<Self> {
        let mut out = Self::new(self.geometry, self.directions.clone(), self.wavenumbers.clone(), data)?;
        out.noise_level = self.noise_level;
        out.seed = self.seed;
        Ok(out)
    }

    pub(crate) fn set_noise(&mut self, delta: f64, seed: Option<u64>) {
        self.noise_level = delta;
        self.seed = seed;
    }

    /// `a·self + b·other` on an identical acquisition.
    pub fn combine(&self, a: Complex64, other: &MeasurementSet, b: Complex64) -> Result<Self> {
        if self.geometry != other.geometry || self.directions != other.directions || self.wavenumbers != other.wavenumbers {
            return Err(QdsmError::domain("measurement sets use different acquisitions"));
        }
        self.with_data(self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Generates data for `phantom` on `forward_grid` with the requested model.
pub fn synthesize(
    phantom: &ContrastPhantom,
    geometry: MeasurementGeometry,
    dirs: &DirectionSet,
    ks: &WavenumberSet,
    forward_grid: &SamplingGrid,
    model: ForwardModel,
) -> Result<MeasurementSet> {
    if phantom.dim() != dirs.dim() {
        return Err(QdsmError::DimensionMismatch {
            expected: dirs.dim().value(),
            found: phantom.dim().value(),
        });
    }
    geometry.check_encloses(phantom.support_radius())?;
    if !forward_grid.contains_ball(phantom.support_radius()) {
        return Err(QdsmError::domain(format!(
            "forward grid does not contain the support ball of radius {}",
            phantom.support_radius()
        )));
    }
    let raster = rasterize(phantom, forward_grid)?;
    synthesize_raster(&raster, geometry, dirs, ks, model)
}

/// As [`synthesize`], from an already rasterized contrast.
pub fn synthesize_raster(
    raster: &ComplexField,
    geometry: MeasurementGeometry,
    dirs: &DirectionSet,
    ks: &WavenumberSet,
    model: ForwardModel,
) -> Result<MeasurementSet> {
    let data = match model {
        ForwardModel::Born => match geometry {
            MeasurementGeometry::FarField => born_far_matrix(raster, dirs, ks)?,
            MeasurementGeometry::NearField { radius } => born_near_matrix(raster, dirs, ks, radius)?,
        },
        ForwardModel::LippmannSchwinger => {
            let disc = LSDiscretization::new(raster.clone())?;
            let n_k = ks.len();
            let mut data = vec![Complex64::new(0.0, 0.0); dirs.len() * n_k];
            for (m, &k) in ks.values().iter().enumerate() {
                let op = disc.operator(k)?;
                let column = dirs
                    .dirs()
                    .iter()
                    .map(|theta| op.backscatter(&geometry, theta))
                    .collect::<Result<Vec<_>>>()?;
                for (j, v) in column.into_iter().enumerate() {
                    data[j * n_k + m] = v;
                }
            }
            data
        }
    };
    MeasurementSet::new(geometry, dirs.clone(), ks.clone(), data)
}

/// Adds complex Gaussian noise scaled so that ‖data′ − data‖_F = δ‖data‖_F.
pub fn add_noise(m: &MeasurementSet, delta: f64, seed: u64) -> Result<MeasurementSet> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(QdsmError::domain(format!(
            "noise level must be nonnegative, got {delta}"
        )));
    }
    let mut out = m.clone();
    out.set_noise(delta, Some(seed));
    if delta == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g: Vec<Complex64> = (0..m.data.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let gnorm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = delta * m.frobenius_norm() / gnorm;
    for (d, e) in out.data.iter_mut().zip(&g) {
        *d += scale * e;
    }
    Ok(out)
}
