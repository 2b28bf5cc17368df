//! Born-approximate backscattering data by midpoint quadrature on a raster.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QdsmError, Result};
use crate::field::ComplexField;
use crate::geometry::{dot, norm, scale, sub, Dim, DirectionSet, Point, WavenumberSet};
use crate::specialfun::{fundamental_at_distance, gamma_unchecked};

/// Phases are recomputed directly every this many recurrence steps.
const RESYNC: usize = 32;

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(QdsmError::domain(format!("wavenumber must be positive, got {k}")))
    }
}

/// u^∞(−θ, θ, k) ≈ k²γₙ(k) Σ q(y) e^{2ikθ·y} |cell|.
pub fn born_far_backscatter(q: &ComplexField, theta: &Point, k: f64) -> Result<Complex64> {
    check_k(k)?;
    let dim = q.grid().dim();
    let cv = q.grid().cell_volume();
    let sum: Complex64 = q
        .support_samples()
        .iter()
        .map(|(y, v)| v * Complex64::from_polar(1.0, 2.0 * k * dot(theta, y)))
        .sum();
    Ok(k * k * gamma_unchecked(k, dim) * cv * sum)
}

/// u^s(x, x, k) ≈ k² Σ q(y) Φ(x, y, k)² |cell| with the source at the receiver.
pub fn born_near_backscatter(q: &ComplexField, x: &Point, k: f64) -> Result<Complex64> {
    check_k(k)?;
    let samples = q.support_samples();
    let reach = samples.iter().map(|(y, _)| norm(y)).fold(0.0, f64::max);
    if norm(x) <= reach {
        return Err(QdsmError::domain(format!(
            "receiver at distance {} lies inside the contrast support (radius {reach})",
            norm(x)
        )));
    }
    let dim = q.grid().dim();
    let cv = q.grid().cell_volume();
    let sum: Complex64 = samples
        .iter()
        .map(|(y, v)| {
            let phi = fundamental_at_distance(norm(&sub(x, y)), k, dim);
            v * phi * phi
        })
        .sum();
    Ok(k * k * cv * sum)
}

/// Accumulates `Σ_s w_s e^{2i k_m p_s}` for every wavenumber using the
/// recurrence e^{2ik_{m+1}p} = e^{2ik_m p}·e^{2iΔk p}.
pub(crate) fn phase_sums(weights: &[(f64, Complex64)], ks: &[f64], dk: f64, out: &mut [Complex64]) {
    out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
    let n_k = ks.len();
    for &(p, w) in weights {
        let step = Complex64::from_polar(1.0, 2.0 * dk * p);
        let mut ph = Complex64::new(0.0, 0.0);
        for m in 0..n_k {
            if m % RESYNC == 0 || m + 1 == n_k {
                ph = Complex64::from_polar(1.0, 2.0 * ks[m] * p);
            } else {
                ph *= step;
            }
            out[m] += w * ph;
        }
    }
}

/// The full N_θ × N_k Born far-field matrix, row-major.
pub fn born_far_matrix(q: &ComplexField, dirs: &DirectionSet, ks: &WavenumberSet) -> Result<Vec<Complex64>> {
    check_dims(q, dirs)?;
    let dim = q.grid().dim();
    let cv = q.grid().cell_volume();
    let samples = q.support_samples();
    let n_k = ks.len();
    let prefactor: Vec<Complex64> = ks
        .values()
        .iter()
        .map(|&k| k * k * gamma_unchecked(k, dim) * cv)
        .collect();
    let rows: Vec<Vec<Complex64>> = dirs
        .dirs()
        .par_iter()
        .map(|theta| {
            let weights: Vec<(f64, Complex64)> = samples.iter().map(|(y, v)| (dot(theta, y), *v)).collect();
            let mut row = vec![Complex64::new(0.0, 0.0); n_k];
            phase_sums(&weights, ks.values(), ks.dk(), &mut row);
            row.iter_mut().zip(&prefactor).for_each(|(r, p)| *r *= p);
            row
        })
        .collect();
    Ok(rows.concat())
}

/// The full N_θ × N_k Born near-field matrix for receivers x_j = Rθ_j.
pub fn born_near_matrix(q: &ComplexField, dirs: &DirectionSet, ks: &WavenumberSet, radius: f64) -> Result<Vec<Complex64>> {
    check_dims(q, dirs)?;
    let dim = q.grid().dim();
    let cv = q.grid().cell_volume();
    let samples = q.support_samples();
    let reach = samples.iter().map(|(y, _)| norm(y)).fold(0.0, f64::max);
    if !(radius > reach) {
        return Err(QdsmError::domain(format!(
            "measurement radius {radius} does not enclose the contrast support (radius {reach})"
        )));
    }
    let kv = ks.values();
    let rows: Vec<Vec<Complex64>> = dirs
        .dirs()
        .par_iter()
        .map(|theta| {
            let x = scale(theta, radius);
            let dist: Vec<(f64, Complex64)> = samples.iter().map(|(y, v)| (norm(&sub(&x, y)), *v)).collect();
            match dim {
                Dim::Two => kv
                    .iter()
                    .map(|&k| {
                        let s: Complex64 = dist
                            .iter()
                            .map(|&(r, v)| {
                                let phi = fundamental_at_distance(r, k, dim);
                                v * phi * phi
                            })
                            .sum();
                        k * k * cv * s
                    })
                    .collect(),
                Dim::Three => {
                    // Φ² = e^{2ikr}/(16π²r²): a pure phase in k after the amplitude
                    let weights: Vec<(f64, Complex64)> = dist
                        .iter()
                        .map(|&(r, v)| (r, v / (16.0 * std::f64::consts::PI.powi(2) * r * r)))
                        .collect();
                    let mut row = vec![Complex64::new(0.0, 0.0); kv.len()];
                    phase_sums(&weights, kv, ks.dk(), &mut row);
                    row.iter_mut().zip(kv).for_each(|(r, &k)| *r *= k * k * cv);
                    row
                }
            }
        })
        .collect();
    Ok(rows.concat())
}

fn check_dims(q: &ComplexField, dirs: &DirectionSet) -> Result<()> {
    if q.grid().dim() != dirs.dim() {
        return Err(QdsmError::DimensionMismatch {
            expected: dirs.dim().value(),
            found: q.grid().dim().value(),
        });
    }
    Ok(())
}
