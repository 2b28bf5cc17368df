//! Dense Lippmann–Schwinger solver for the total field on a forward raster.
//!
//! Unknowns live on the cells where the contrast is nonzero. Off-diagonal
//! kernel entries are midpoint values Φ(xᵢ, yⱼ); the diagonal integrates Φ
//! exactly over a disk (2D) or ball (3D) with the cell's area or volume.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::krylov::{gmres, GmresOptions};
use crate::error::{QdsmError, Result};
use crate::field::ComplexField;
use crate::geometry::{dot, norm, sub, Dim, MeasurementGeometry, Point};
use crate::specialfun::{fundamental_at_distance, gamma_unchecked, hankel1_h1};

/// Returned solutions must satisfy this relative residual.
pub const RESIDUAL_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Incident {
    /// e^{ikθ·x}
    PlaneWave(Point),
    /// Φ(x, z, k)
    PointSource(Point),
}

impl Incident {
    fn eval(&self, x: &Point, k: f64, dim: Dim) -> Result<Complex64> {
        match self {
            Incident::PlaneWave(theta) => Ok(Complex64::from_polar(1.0, k * dot(theta, x))),
            Incident::PointSource(z) => {
                let r = norm(&sub(x, z));
                if r == 0.0 {
                    return Err(QdsmError::Singular(
                        "point source placed on a forward grid node".into(),
                    ));
                }
                Ok(fundamental_at_distance(r, k, dim))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LSDiscretization {
    raster: ComplexField,
    support: Vec<(usize, Point, Complex64)>,
    cell_volume: f64,
    /// Radius of the disk or ball with the cell's measure.
    self_radius: f64,
}

impl LSDiscretization {
    pub fn new(raster: ComplexField) -> Result<Self> {
        let grid = raster.grid();
        let cell_volume = grid.cell_volume();
        let self_radius = match grid.dim() {
            Dim::Two => (cell_volume / PI).sqrt(),
            Dim::Three => (3.0 * cell_volume / (4.0 * PI)).cbrt(),
        };
        let support: Vec<_> = raster
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|(i, &v)| (i, grid.point(i), v))
            .collect();
        // the raster must vanish on its outer boundary
        for &(i, _, _) in &support {
            let idx = grid.multi_index(i);
            if (0..grid.dim().value()).any(|a| idx[a] == 0 || idx[a] + 1 == grid.counts()[a]) {
                return Err(QdsmError::domain(
                    "forward grid does not cover the contrast support (nonzero boundary value)",
                ));
            }
        }
        Ok(Self {
            raster,
            support,
            cell_volume,
            self_radius,
        })
    }

    pub fn raster(&self) -> &ComplexField {
        &self.raster
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn unknowns(&self) -> usize {
        self.support.len()
    }

    /// ∫ Φ(x, y, k) dy over the equal-measure disk or ball centered at x.
    pub fn self_cell_integral(&self, k: f64) -> Result<Complex64> {
        let rho = self.self_radius;
        let kr = k * rho;
        Ok(match self.raster.grid().dim() {
            Dim::Two => Complex64::new(0.0, PI * rho / (2.0 * k)) * hankel1_h1(kr)? - 1.0 / (k * k),
            Dim::Three => {
                ((Complex64::new(1.0, -kr)) * Complex64::from_polar(1.0, kr) - 1.0) / (k * k)
            }
        })
    }

    /// Assembles I − k²T_q restricted to the support cells.
    pub fn operator(&self, k: f64) -> Result<LSOperator<'_>> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(QdsmError::domain(format!("wavenumber must be positive, got {k}")));
        }
        let n = self.support.len();
        let dim = self.raster.grid().dim();
        let diag = self.self_cell_integral(k)?;
        let k2cv = k * k * self.cell_volume;
        let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
        matrix.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            let xi = &self.support[i].1;
            for (j, (_, yj, qj)) in self.support.iter().enumerate() {
                let kernel = if i == j {
                    diag * k * k
                } else {
                    fundamental_at_distance(norm(&sub(xi, yj)), k, dim) * k2cv
                };
                row[j] = -kernel * qj;
            }
            row[i] += 1.0;
        });
        Ok(LSOperator {
            disc: self,
            k,
            matrix,
        })
    }
}

/// The assembled system for one wavenumber.
pub struct LSOperator<'a> {
    disc: &'a LSDiscretization,
    k: f64,
    matrix: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct LSSolution {
    pub field: ComplexField,
    pub iterations: usize,
    /// ‖u − u^inc − k²T_q u‖ / ‖u^inc‖ over the support cells.
    pub residual: f64,
}

impl LSOperator<'_> {
    pub fn k(&self) -> f64 {
        self.k
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = v.len();
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let row = &self.matrix[i * n..(i + 1) * n];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        });
    }

    /// The total field on the support cells, in support order.
    fn solve_support(&self, incident: Incident) -> Result<(Vec<Complex64>, usize, f64)> {
        let dim = self.disc.raster.grid().dim();
        let rhs = self
            .disc
            .support
            .iter()
            .map(|(_, x, _)| incident.eval(x, self.k, dim))
            .collect::<Result<Vec<_>>>()?;
        let options = GmresOptions {
            tol: 1e-11,
            ..GmresOptions::default()
        };
        let out = gmres(|v, o| self.apply(v, o), &rhs, options)?;
        if !(out.residual <= RESIDUAL_LIMIT) {
            return Err(QdsmError::Solver {
                iterations: out.iterations,
                residual: out.residual,
            });
        }
        Ok((out.x, out.iterations, out.residual))
    }

    /// Solves for the total field and extends it to the whole raster.
    pub fn solve(&self, incident: Incident) -> Result<LSSolution> {
        let disc = self.disc;
        let grid = disc.raster.grid();
        let dim = grid.dim();
        let k = self.k;
        let (u, iterations, residual) = self.solve_support(incident)?;

        let on_support: std::collections::HashMap<usize, usize> =
            disc.support.iter().enumerate().map(|(s, (i, _, _))| (*i, s)).collect();
        let k2cv = k * k * disc.cell_volume;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                if let Some(&s) = on_support.get(&i) {
                    return Ok(u[s]);
                }
                let x = grid.point(i);
                let scattered: Complex64 = disc
                    .support
                    .iter()
                    .zip(&u)
                    .map(|((_, y, q), u)| fundamental_at_distance(norm(&sub(&x, y)), k, dim) * q * u)
                    .sum();
                Ok(incident.eval(&x, k, dim)? + k2cv * scattered)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LSSolution {
            field: ComplexField::new(grid.clone(), values)?,
            iterations,
            residual,
        })
    }

    /// Backscattered far field at x̂ = −θ, or near field at the source point.
    pub fn backscatter(&self, geometry: &MeasurementGeometry, dir: &Point) -> Result<Complex64> {
        let disc = self.disc;
        let dim = disc.raster.grid().dim();
        let k = self.k;
        match geometry {
            MeasurementGeometry::FarField => {
                let (u, _, _) = self.solve_support(Incident::PlaneWave(*dir))?;
                let sum: Complex64 = disc
                    .support
                    .iter()
                    .zip(&u)
                    .map(|((_, y, q), u)| q * Complex64::from_polar(1.0, k * dot(dir, y)) * u)
                    .sum();
                Ok(k * k * gamma_unchecked(k, dim) * disc.cell_volume * sum)
            }
            MeasurementGeometry::NearField { radius } => {
                let x = crate::geometry::scale(dir, *radius);
                let (u, _, _) = self.solve_support(Incident::PointSource(x))?;
                let sum: Complex64 = disc
                    .support
                    .iter()
                    .zip(&u)
                    .map(|((_, y, q), u)| q * fundamental_at_distance(norm(&sub(&x, y)), k, dim) * u)
                    .sum();
                Ok(k * k * disc.cell_volume * sum)
            }
        }
    }
}

/// Convenience wrapper: assemble at `k` and solve once.
pub fn ls_total_field(disc: &LSDiscretization, incident: Incident, k: f64) -> Result<LSSolution> {
    disc.operator(k)?.solve(incident)
}

/// One backscattering datum from the exact model. `dir` is θ for far-field
/// data; for near-field data the source and receiver sit at R·dir.
pub fn ls_backscatter(disc: &LSDiscretization, geometry: &MeasurementGeometry, dir: &Point, k: f64) -> Result<Complex64> {
    disc.operator(k)?.backscatter(geometry, dir)
}

/// ‖u − u^inc − k²T_q u‖ / ‖u^inc‖ over the support cells, recomputed from
/// the kernel rather than the assembled matrix.
pub fn ls_residual(disc: &LSDiscretization, incident: Incident, k: f64, u: &ComplexField) -> Result<f64> {
    let dim = disc.raster.grid().dim();
    let diag = disc.self_cell_integral(k)?;
    let k2cv = k * k * disc.cell_volume;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, x, qi) in &disc.support {
        let mut tu = diag * k * k * qi * u.values()[*i];
        for (j, y, qj) in &disc.support {
            if j != i {
                tu += fundamental_at_distance(norm(&sub(x, y)), k, dim) * k2cv * qj * u.values()[*j];
            }
        }
        let inc = incident.eval(x, k, dim)?;
        num += (u.values()[*i] - inc - tu).norm_sqr();
        den += inc.norm_sqr();
    }
    Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
}
