//! Error metrics, Sobolev norms, the wavenumber-truncation bound and
//! low-frequency moment extraction.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{QdsmError, Result};
use crate::field::{ComplexField, FieldPart};
use crate::forward::MeasurementSet;
use crate::geometry::{dot, norm, Dim, DirectionSet, Point, SamplingGrid};
use crate::specialfun::gamma_unchecked;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub rel_l2: f64,
    pub rel_linf: f64,
    /// True when the reference vanishes and both errors are absolute.
    pub absolute: bool,
    pub bound_theorem4: Option<f64>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

/// Relative discrete ℓ² and ℓ^∞ errors of `reconstruction` against `truth`.
pub fn rel_errors(reconstruction: &ComplexField, truth: &ComplexField) -> Result<ErrorReport> {
    reconstruction.check_same_grid(truth)?;
    let pairs = reconstruction.values().iter().zip(truth.values());
    Ok(report(pairs.map(|(r, t)| ((r - t).norm(), t.norm()))))
}

/// As [`rel_errors`] on one real projection of both fields.
pub fn rel_errors_part(reconstruction: &ComplexField, truth: &ComplexField, part: FieldPart) -> Result<ErrorReport> {
    reconstruction.check_same_grid(truth)?;
    let pairs = reconstruction.values().iter().zip(truth.values());
    Ok(report(pairs.map(|(r, t)| {
        let (r, t) = (part.of(*r), part.of(*t));
        ((r - t).abs(), t.abs())
    })))
}

fn report(pairs: impl Iterator<Item = (f64, f64)>) -> ErrorReport {
    let (mut d2, mut t2, mut dmax, mut tmax) = (0.0, 0.0, 0.0f64, 0.0f64);
    for (d, t) in pairs {
        d2 += d * d;
        t2 += t * t;
        dmax = dmax.max(d);
        tmax = tmax.max(t);
    }
    let absolute = t2 == 0.0;
    let (rel_l2, rel_linf) = if absolute {
        (d2.sqrt(), dmax)
    } else {
        (d2.sqrt() / t2.sqrt(), dmax / tmax)
    };
    ErrorReport {
        rel_l2,
        rel_linf,
        absolute,
        bound_theorem4: None,
        metadata: BTreeMap::new(),
    }
}

/// (Σ|f|² |cell|)^{1/2}.
pub fn l2_norm(field: &ComplexField) -> f64 {
    let s: f64 = field.values().iter().map(|v| v.norm_sqr()).sum();
    (s * field.grid().cell_volume()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2Norm {
    pub value: f64,
    /// Set when the raster does not decay at its boundary, so periodization
    /// makes the value unreliable.
    pub boundary_warning: bool,
}

/// (2π)^{−n} (∫(1 + |ξ|²)² |f̂(ξ)|² dξ)^{1/2} from a zero-padded DFT of the raster.
pub fn h2_norm(field: &ComplexField) -> Result<H2Norm> {
    h2_norm_padded(field, 2)
}

pub fn h2_norm_padded(field: &ComplexField, pad: usize) -> Result<H2Norm> {
    if pad == 0 {
        return Err(QdsmError::domain("padding factor must be at least 1"));
    }
    let grid = field.grid();
    let n = grid.dim().value();
    let counts: Vec<usize> = grid.counts().iter().map(|c| c * pad).collect();
    let total: usize = counts.iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    let strides: Vec<usize> = (0..n).map(|a| counts[a + 1..].iter().product()).collect();
    for (i, v) in field.values().iter().enumerate() {
        let idx = grid.multi_index(i);
        let flat: usize = (0..n).map(|a| idx[a] * strides[a]).sum();
        buf[flat] = *v;
    }

    let mut planner = FftPlanner::<f64>::new();
    for a in 0..n {
        let len = counts[a];
        let fft = planner.plan_fft_forward(len);
        let stride = strides[a];
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for start in 0..total {
            // visit each line once, from its first element
            if (start / stride) % len != 0 {
                continue;
            }
            for (t, l) in line.iter_mut().enumerate() {
                *l = buf[start + t * stride];
            }
            fft.process(&mut line);
            for (t, l) in line.iter().enumerate() {
                buf[start + t * stride] = *l;
            }
        }
    }

    let cv = grid.cell_volume();
    let dxi: Vec<f64> = (0..n).map(|a| 2.0 * PI / (counts[a] as f64 * grid.spacing(a))).collect();
    let dvol: f64 = dxi.iter().product();
    let mut sum = 0.0;
    for (flat, v) in buf.iter().enumerate() {
        let mut xi2 = 0.0;
        for a in 0..n {
            let t = (flat / strides[a]) % counts[a];
            let signed = if t <= counts[a] / 2 { t as f64 } else { t as f64 - counts[a] as f64 };
            xi2 += (signed * dxi[a]).powi(2);
        }
        sum += (1.0 + xi2).powi(2) * (v * cv).norm_sqr();
    }
    let value = (sum * dvol).sqrt() / (2.0 * PI).powi(n as i32);

    let peak = field.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = field
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let idx = grid.multi_index(*i);
            (0..n).any(|a| idx[a] == 0 || idx[a] + 1 == grid.counts()[a])
        })
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    Ok(H2Norm {
        value,
        boundary_warning: edge > 1e-8 * peak,
    })
}

/// Uniform bound on |I_𝒦(z) − q(z)| for data restricted to [k_min, k_max]:
/// √π(h2/k_max + k_min·l2) in 2D and 2√π(h2/√k_max + (√3/3)k_min^{3/2}·l2) in 3D.
pub fn truncation_bound(h2: f64, l2: f64, k_min: f64, k_max: f64, dim: Dim) -> Result<f64> {
    if !(h2 >= 0.0 && l2 >= 0.0 && h2.is_finite() && l2.is_finite()) {
        return Err(QdsmError::domain("norms must be finite and nonnegative"));
    }
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) {
        return Err(QdsmError::domain(format!(
            "need 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    let sp = PI.sqrt();
    Ok(match dim {
        Dim::Two => sp * (h2 / k_max + k_min * l2),
        Dim::Three => 2.0 * sp * (h2 / k_max.sqrt() + 3f64.sqrt() / 3.0 * k_min.powf(1.5) * l2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    /// ≈ ∫ q dy
    pub mass: Complex64,
    /// ≈ ∫ q(y) y dy, one entry per coordinate.
    pub first_moment: Vec<Complex64>,
}

/// Probe wavenumbers (1/3, 2/3, 1)·0.05/support_radius.
pub fn default_probes(support_radius: f64) -> Result<Vec<f64>> {
    if !(support_radius > 0.0 && support_radius.is_finite()) {
        return Err(QdsmError::domain(format!(
            "support radius must be positive, got {support_radius}"
        )));
    }
    let top = 0.05 / support_radius;
    Ok(vec![top / 3.0, 2.0 * top / 3.0, top])
}

/// Recovers ∫q and ∫q·y from low-wavenumber Born far-field data.
///
/// Per direction the normalized datum u/(k²γₙ) is fitted by a line
/// c₀ + c₁k in the probe wavenumbers. The mass is the direction mean of c₀,
/// and the first moment solves c₁ = 2i θ·m₁ in the least-squares sense.
pub fn low_freq_moments(
    born_far: impl Fn(&Point, f64) -> Complex64,
    dirs: &DirectionSet,
    k_probe: &[f64],
) -> Result<MomentEstimate> {
    let dim = dirs.dim();
    let n = dim.value();
    if k_probe.len() < 2 {
        return Err(QdsmError::domain("need at least two probe wavenumbers"));
    }
    if k_probe.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(QdsmError::domain("probe wavenumbers must be positive"));
    }
    if dirs.len() < n {
        return Err(QdsmError::domain(format!(
            "need at least {n} directions, got {}",
            dirs.len()
        )));
    }
    let kbar = k_probe.iter().sum::<f64>() / k_probe.len() as f64;
    let skk: f64 = k_probe.iter().map(|k| (k - kbar).powi(2)).sum();
    if skk <= 0.0 {
        return Err(QdsmError::domain("probe wavenumbers must not all coincide"));
    }

    let mut c0 = Vec::with_capacity(dirs.len());
    let mut c1 = Vec::with_capacity(dirs.len());
    for theta in dirs.dirs() {
        let ys: Vec<Complex64> = k_probe
            .iter()
            .map(|&k| born_far(theta, k) / (k * k * gamma_unchecked(k, dim)))
            .collect();
        let ybar = ys.iter().sum::<Complex64>() / k_probe.len() as f64;
        let slope = k_probe.iter().zip(&ys).map(|(k, y)| (k - kbar) * (y - ybar)).sum::<Complex64>() / skk;
        c0.push(ybar - slope * kbar);
        c1.push(slope);
    }
    let mass = c0.iter().sum::<Complex64>() / c0.len() as f64;

    // normal equations ΘᵀΘ m = Θᵀ c₁/(2i)
    let mut ata = vec![vec![0.0; n]; n];
    let mut atb = vec![Complex64::new(0.0, 0.0); n];
    for (theta, s) in dirs.dirs().iter().zip(&c1) {
        let rhs = s / Complex64::new(0.0, 2.0);
        for r in 0..n {
            atb[r] += theta[r] * rhs;
            for c in 0..n {
                ata[r][c] += theta[r] * theta[c];
            }
        }
    }
    let first_moment = solve_real_system(ata, atb)?;
    Ok(MomentEstimate { mass, first_moment })
}

/// Gaussian elimination with partial pivoting for a small real matrix and
/// complex right-hand side.
fn solve_real_system(mut a: Vec<Vec<f64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.len();
    let scale = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[piv][col].abs() <= 1e-12 * scale {
            return Err(QdsmError::domain(
                "directions do not span the space; first moment is undetermined",
            ));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            let bc = b[col];
            b[r] -= f * bc;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Ok(x)
}

/// Midpoint-rule ∫q and ∫q·y of a raster.
pub fn raster_moments(field: &ComplexField) -> MomentEstimate {
    let grid = field.grid();
    let n = grid.dim().value();
    let cv = grid.cell_volume();
    let mut mass = Complex64::new(0.0, 0.0);
    let mut first = vec![Complex64::new(0.0, 0.0); n];
    for (i, v) in field.values().iter().enumerate() {
        let y = grid.point(i);
        mass += v * cv;
        for a in 0..n {
            first[a] += v * y[a] * cv;
        }
    }
    MomentEstimate {
        mass,
        first_moment: first,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub theta: Point,
    pub numeric: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub mass_numeric: f64,
    pub mass_exact: f64,
    pub moments: Vec<MomentPair>,
    pub max_discrepancy: f64,
}

/// Checks the moment identities for r(y) = α·y + c on the ball B_R:
/// ∫r = c|B_R| and ∫r·(θ·y) = (α·θ)·∫y₁², for `n_dirs` seeded random θ.
pub fn uniqueness_moment_check(
    alpha: &[f64],
    c: f64,
    radius: f64,
    quad_grid: &SamplingGrid,
    n_dirs: usize,
    seed: u64,
) -> Result<UniquenessReport> {
    let dim = quad_grid.dim();
    let n = dim.value();
    if alpha.len() != n {
        return Err(QdsmError::DimensionMismatch {
            expected: n,
            found: alpha.len(),
        });
    }
    if !(radius > 0.0) || !quad_grid.contains_ball(radius) {
        return Err(QdsmError::domain(format!(
            "quadrature grid must cover the ball of radius {radius}"
        )));
    }
    let mut a = [0.0; 3];
    a[..n].copy_from_slice(alpha);
    let (ball, second) = match dim {
        Dim::Two => (PI * radius.powi(2), PI * radius.powi(4) / 4.0),
        Dim::Three => (4.0 * PI * radius.powi(3) / 3.0, 4.0 * PI * radius.powi(5) / 15.0),
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let thetas: Vec<Point> = (0..n_dirs)
        .map(|_| loop {
            let mut t = [0.0; 3];
            for v in t.iter_mut().take(n) {
                *v = rng.random_range(-1.0..1.0);
            }
            let r = norm(&t);
            if r > 1e-3 && r <= 1.0 {
                break [t[0] / r, t[1] / r, t[2] / r];
            }
        })
        .collect();

    let cv = quad_grid.cell_volume();
    let mut mass = 0.0;
    let mut sums = vec![0.0; thetas.len()];
    for y in quad_grid.points() {
        if norm(&y) > radius {
            continue;
        }
        let r = dot(&a, &y) + c;
        mass += r * cv;
        for (s, t) in sums.iter_mut().zip(&thetas) {
            *s += r * dot(t, &y) * cv;
        }
    }
    let moments: Vec<MomentPair> = thetas
        .iter()
        .zip(&sums)
        .map(|(t, s)| MomentPair {
            theta: *t,
            numeric: *s,
            exact: dot(&a, t) * second,
        })
        .collect();
    let mass_exact = c * ball;
    let max_discrepancy = moments
        .iter()
        .map(|m| (m.numeric - m.exact).abs())
        .fold((mass - mass_exact).abs(), f64::max);
    Ok(UniquenessReport {
        mass_numeric: mass,
        mass_exact,
        moments,
        max_discrepancy,
    })
}

/// ‖a − b‖_F / ‖b‖_F for two data sets on the same acquisition.
pub fn data_discrepancy(a: &MeasurementSet, b: &MeasurementSet) -> Result<f64> {
    let d = a.combine(Complex64::new(1.0, 0.0), b, Complex64::new(-1.0, 0.0))?;
    let nb = b.frobenius_norm();
    Ok(if nb == 0.0 { d.frobenius_norm() } else { d.frobenius_norm() / nb })
}
