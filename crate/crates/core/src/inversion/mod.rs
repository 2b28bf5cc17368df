//! Direct-sampling indicators for far-field and near-field backscattering
//! data, evaluated pointwise over a sampling grid.
//!
//! Far field, with `Δθ` the direction weight and `Δk` the wavenumber step:
//!
//! ```text
//! 2D: I(z) = 2(1−i)ΔθΔk/π^{3/2} Σ_m k_m^{−1/2} Σ_j u[j][m] e^{−2ik_m θ_j·z}
//! 3D: I(z) = 4ΔθΔk/π²          Σ_m          Σ_j u[j][m] e^{−2ik_m θ_j·z}
//! ```
//!
//! Near field on the sphere of radius R:
//!
//! ```text
//! 2D: I(z) = −8iRΔθΔk/π  Σ_m Σ_j u[j][m] e^{2ik_m(θ_j·z − R)}
//! 3D: I(z) = 16R²ΔθΔk/π  Σ_m Σ_j u[j][m] e^{2ik_m(θ_j·z − R)}
//! ```
//!
//! Sums always run with the wavenumber index outer and the direction index
//! inner, so every grid point is reduced in the same order.

mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QdsmError, Result};
use crate::field::ComplexField;
use crate::forward::MeasurementSet;
use crate::geometry::{dot, Dim, MeasurementGeometry, SamplingGrid};

pub use oracle::{continuous_indicator_oracle, gauss_kronrod_adaptive, gauss_legendre, OracleOptions};

/// Phases are recomputed directly every this many recurrence steps.
const RESYNC: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Every phase factor from its own complex exponential.
    Direct,
    /// Phase factors advanced by a per-direction recurrence in k.
    #[default]
    Recurrence,
}

/// Prefactor and per-wavenumber weights of one indicator.
struct Kernel {
    coefficient: Complex64,
    k_weights: Vec<f64>,
    /// +1 for e^{+2ik(θ·z − R)}, −1 for e^{−2ikθ·z}.
    sign: f64,
    offset: f64,
}

fn far_kernel(m: &MeasurementSet) -> Kernel {
    let dtheta = m.directions().weight();
    let dk = m.wavenumbers().dk();
    let ks = m.wavenumbers().values();
    let (coefficient, k_weights) = match m.directions().dim() {
        Dim::Two => (
            Complex64::new(1.0, -1.0) * (2.0 * dtheta * dk / PI.powf(1.5)),
            ks.iter().map(|k| 1.0 / k.sqrt()).collect(),
        ),
        Dim::Three => (
            Complex64::new(4.0 * dtheta * dk / (PI * PI), 0.0),
            vec![1.0; ks.len()],
        ),
    };
    Kernel {
        coefficient,
        k_weights,
        sign: -1.0,
        offset: 0.0,
    }
}

fn near_kernel(m: &MeasurementSet, radius: f64) -> Kernel {
    let dtheta = m.directions().weight();
    let dk = m.wavenumbers().dk();
    let coefficient = match m.directions().dim() {
        Dim::Two => Complex64::new(0.0, -8.0 * radius * dtheta * dk / PI),
        Dim::Three => Complex64::new(16.0 * radius * radius * dtheta * dk / PI, 0.0),
    };
    Kernel {
        coefficient,
        k_weights: vec![1.0; m.n_k()],
        sign: 1.0,
        offset: radius,
    }
}

fn check_grid(m: &MeasurementSet, grid: &SamplingGrid) -> Result<()> {
    if m.directions().dim() != grid.dim() {
        return Err(QdsmError::DimensionMismatch {
            expected: m.directions().dim().value(),
            found: grid.dim().value(),
        });
    }
    Ok(())
}

/// Far-field indicator over `grid`.
pub fn indicator_far(m: &MeasurementSet, grid: &SamplingGrid) -> Result<ComplexField> {
    indicator_far_with(m, grid, Evaluation::default())
}

pub fn indicator_far_with(m: &MeasurementSet, grid: &SamplingGrid, eval: Evaluation) -> Result<ComplexField> {
    if *m.geometry() != MeasurementGeometry::FarField {
        return Err(QdsmError::domain("far-field indicator needs far-field data"));
    }
    check_grid(m, grid)?;
    evaluate(m, grid, &far_kernel(m), eval)
}

/// Near-field indicator over `grid`, using the radius recorded in `m`.
pub fn indicator_near(m: &MeasurementSet, grid: &SamplingGrid) -> Result<ComplexField> {
    indicator_near_with(m, grid, Evaluation::default())
}

pub fn indicator_near_with(m: &MeasurementSet, grid: &SamplingGrid, eval: Evaluation) -> Result<ComplexField> {
    let radius = match m.geometry() {
        MeasurementGeometry::NearField { radius } => *radius,
        MeasurementGeometry::FarField => {
            return Err(QdsmError::domain("near-field indicator needs near-field data"))
        }
    };
    check_grid(m, grid)?;
    evaluate(m, grid, &near_kernel(m, radius), eval)
}

/// Dispatches on the recorded geometry.
pub fn indicator(m: &MeasurementSet, grid: &SamplingGrid) -> Result<ComplexField> {
    match m.geometry() {
        MeasurementGeometry::FarField => indicator_far(m, grid),
        MeasurementGeometry::NearField { .. } => indicator_near(m, grid),
    }
}

fn evaluate(m: &MeasurementSet, grid: &SamplingGrid, kernel: &Kernel, eval: Evaluation) -> Result<ComplexField> {
    let n_theta = m.n_theta();
    let n_k = m.n_k();
    let ks = m.wavenumbers().values();
    let dk = m.wavenumbers().dk();
    let dirs = m.directions().dirs();
    // wavenumber-major copy so the inner direction loop is contiguous
    let mut by_k = vec![Complex64::new(0.0, 0.0); n_theta * n_k];
    for j in 0..n_theta {
        for mm in 0..n_k {
            by_k[mm * n_theta + j] = m.at(j, mm);
        }
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map_init(
            || (vec![0.0; n_theta], vec![Complex64::new(0.0, 0.0); n_theta], vec![Complex64::new(0.0, 0.0); n_theta]),
            |(proj, phase, step), i| {
                let z = grid.point(i);
                for (p, theta) in proj.iter_mut().zip(dirs) {
                    *p = kernel.sign * 2.0 * (dot(theta, &z) - kernel.offset);
                }
                let mut total = Complex64::new(0.0, 0.0);
                match eval {
                    Evaluation::Direct => {
                        for (mm, &k) in ks.iter().enumerate() {
                            let row = &by_k[mm * n_theta..(mm + 1) * n_theta];
                            let s: Complex64 = row
                                .iter()
                                .zip(proj.iter())
                                .map(|(u, p)| u * Complex64::from_polar(1.0, k * p))
                                .sum();
                            total += kernel.k_weights[mm] * s;
                        }
                    }
                    Evaluation::Recurrence => {
                        for (st, p) in step.iter_mut().zip(proj.iter()) {
                            *st = Complex64::from_polar(1.0, dk * p);
                        }
                        for (mm, &k) in ks.iter().enumerate() {
                            if mm % RESYNC == 0 || mm + 1 == n_k {
                                for (ph, p) in phase.iter_mut().zip(proj.iter()) {
                                    *ph = Complex64::from_polar(1.0, k * p);
                                }
                            } else {
                                for (ph, st) in phase.iter_mut().zip(step.iter()) {
                                    *ph *= st;
                                }
                            }
                            let row = &by_k[mm * n_theta..(mm + 1) * n_theta];
                            let s: Complex64 = row.iter().zip(phase.iter()).map(|(u, ph)| u * ph).sum();
                            total += kernel.k_weights[mm] * s;
                        }
                    }
                }
                kernel.coefficient * total
            },
        )
        .collect();
    ComplexField::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_wavenumbers, uniform_circle_directions, DirectionSet, WavenumberSet};

    fn single(geometry: MeasurementGeometry) -> MeasurementSet {
        let dirs = DirectionSet::from_vectors(Dim::Two, vec![[1.0, 0.0, 0.0]]).unwrap();
        let ks = make_wavenumbers(1.0, 2.0, 2).unwrap();
        MeasurementSet::new(geometry, dirs, ks, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap()
    }

    fn origin_grid() -> SamplingGrid {
        SamplingGrid::new(Dim::Two, vec![0.0, 0.0], vec![1.0, 1.0], vec![2, 2]).unwrap()
    }

    #[test]
    fn single_term_far_coefficient() {
        let m = single(MeasurementGeometry::FarField);
        let f = indicator_far(&m, &origin_grid()).unwrap();
        let (dtheta, dk) = (2.0 * PI, 1.0);
        let want = Complex64::new(2.0, -2.0) * dtheta * dk / PI.powf(1.5);
        assert!((f.values()[0] - want).norm() < 1e-15);
    }

    #[test]
    fn single_term_near_coefficient() {
        let m = single(MeasurementGeometry::NearField { radius: 5.0 });
        let f = indicator_near(&m, &origin_grid()).unwrap();
        let want = Complex64::new(0.0, -8.0 * 5.0 * 2.0 * PI / PI) * Complex64::from_polar(1.0, -10.0);
        assert!((f.values()[0] - want).norm() < 1e-14);
    }

    #[test]
    fn wrong_kind_and_dim_rejected() {
        let far = single(MeasurementGeometry::FarField);
        let near = single(MeasurementGeometry::NearField { radius: 2.0 });
        assert!(indicator_near(&far, &origin_grid()).is_err());
        assert!(indicator_far(&near, &origin_grid()).is_err());
        let g3 = SamplingGrid::cube(Dim::Three, -1.0, 1.0, 2).unwrap();
        assert!(indicator_far(&far, &g3).is_err());
    }

    fn pseudo_random_set(geometry: MeasurementGeometry, ks: WavenumberSet) -> MeasurementSet {
        let dirs = uniform_circle_directions(13).unwrap();
        MeasurementSet::from_closure(geometry, dirs, ks, |t, k| {
            Complex64::new((7.0 * t[0] + k).sin(), (3.0 * t[1] - 0.5 * k).cos())
        })
        .unwrap()
    }

    #[test]
    fn recurrence_agrees_with_direct() {
        let grid = SamplingGrid::cube(Dim::Two, -0.4, 0.4, 9).unwrap();
        let ks = make_wavenumbers(1.0, 121.0, 241).unwrap();
        for geom in [MeasurementGeometry::FarField, MeasurementGeometry::NearField { radius: 5.0 }] {
            let m = pseudo_random_set(geom, ks.clone());
            let (a, b) = match geom {
                MeasurementGeometry::FarField => (
                    indicator_far_with(&m, &grid, Evaluation::Direct).unwrap(),
                    indicator_far_with(&m, &grid, Evaluation::Recurrence).unwrap(),
                ),
                _ => (
                    indicator_near_with(&m, &grid, Evaluation::Direct).unwrap(),
                    indicator_near_with(&m, &grid, Evaluation::Recurrence).unwrap(),
                ),
            };
            let scale = a.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn zero_data_zero_field() {
        let ks = make_wavenumbers(1.0, 5.0, 5).unwrap();
        let dirs = uniform_circle_directions(6).unwrap();
        let m = MeasurementSet::new(MeasurementGeometry::FarField, dirs, ks, vec![Complex64::new(0.0, 0.0); 30]).unwrap();
        let f = indicator(&m, &SamplingGrid::cube(Dim::Two, -1.0, 1.0, 5).unwrap()).unwrap();
        assert!(f.values().iter().all(|v| v.norm() == 0.0));
    }
}
