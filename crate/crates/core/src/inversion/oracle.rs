//! High-accuracy quadrature of the band-limited continuous far-field
//! indicator, used as an independent reference for the discrete sums.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QdsmError, Result};
use crate::geometry::{dot, Dim, Point};
use crate::specialfun::gamma_unchecked;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Relative tolerance of the wavenumber integral.
    pub rel_tol: f64,
    /// Relative tolerance of each sphere integral.
    pub sphere_tol: f64,
    pub max_subintervals: usize,
    pub max_sphere_points: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            sphere_tol: 1e-12,
            max_subintervals: 4000,
            max_sphere_points: 1 << 14,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> Result<Complex64>>(f: &mut F, a: f64, b: f64) -> Result<Piece> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let f1 = f(c - h * XGK[i])?;
        let f2 = f(c + h * XGK[i])?;
        k += (f1 + f2) * WGK[i];
        if i % 2 == 1 {
            g += (f1 + f2) * WG[i / 2];
        }
    }
    Ok(Piece {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).norm(),
    })
}

/// Globally adaptive 15-point Gauss–Kronrod integration of a complex
/// function on `[a, b]`, starting from `initial` equal pieces.
pub fn gauss_kronrod_adaptive<F: FnMut(f64) -> Result<Complex64>>(
    mut f: F,
    a: f64,
    b: f64,
    initial: usize,
    rel_tol: f64,
    max_subintervals: usize,
) -> Result<Complex64> {
    let n0 = initial.max(1);
    let mut heap = BinaryHeap::new();
    let width = (b - a) / n0 as f64;
    for i in 0..n0 {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == n0 { b } else { lo + width };
        heap.push(kronrod(&mut f, lo, hi)?);
    }
    loop {
        let total: Complex64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let scale = total.norm().max(heap.iter().map(|p| p.value.norm()).sum::<f64>() * 1e-6);
        if err <= rel_tol * scale || err == 0.0 {
            return Ok(total);
        }
        if heap.len() >= max_subintervals {
            return Err(QdsmError::Accuracy(format!(
                "adaptive quadrature reached {} pieces with error {err:.3e} on |I| = {:.3e}",
                heap.len(),
                total.norm()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod(&mut f, worst.a, mid)?);
        heap.push(kronrod(&mut f, mid, worst.b)?);
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * t * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { t } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (t * pn - pnm1) / (t * t - 1.0);
            let dt = pn / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// ∫_{S^{n−1}} g ds by trapezoid in azimuth (and Gauss–Legendre in the
/// polar cosine in 3D), doubling until two levels agree.
fn sphere_integral<G: FnMut(&Point) -> Complex64>(mut g: G, dim: Dim, opts: &OracleOptions) -> Result<Complex64> {
    // each level returns the integral and the integral of |g|
    let mut rule = |n: usize| -> (Complex64, f64) {
        let mut s = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let h = 2.0 * PI / n as f64;
        match dim {
            Dim::Two => {
                for j in 0..n {
                    let t = j as f64 * h;
                    let v = g(&[t.cos(), t.sin(), 0.0]);
                    s += v * h;
                    abs += v.norm() * h;
                }
            }
            Dim::Three => {
                let (xs, ws) = gauss_legendre(n / 2);
                for (c, w) in xs.iter().zip(&ws) {
                    let r = (1.0 - c * c).sqrt();
                    for j in 0..n {
                        let t = j as f64 * h;
                        let v = g(&[r * t.cos(), r * t.sin(), *c]);
                        s += v * (w * h);
                        abs += v.norm() * w * h;
                    }
                }
            }
        }
        (s, abs)
    };
    let mut n = 16;
    let (mut prev, _) = rule(n);
    loop {
        n *= 2;
        let (cur, abs) = rule(n);
        let diff = (cur - prev).norm();
        if diff <= opts.sphere_tol * cur.norm().max(1e-6 * abs) || diff == 0.0 {
            return Ok(cur);
        }
        if n >= opts.max_sphere_points {
            return Err(QdsmError::Accuracy(format!(
                "sphere quadrature unresolved at {n} points"
            )));
        }
        prev = cur;
    }
}

/// π^{−n} ∫_{k_min}^{k_max} γₙ(k)^{−1} k^{n−3} ∫_{S^{n−1}} u^∞(θ, k) e^{−2ikθ·z} ds dk,
/// the continuous far-field indicator restricted to a wavenumber band.
pub fn continuous_indicator_oracle<F: Fn(&Point, f64) -> Complex64>(
    far_field: F,
    z: &Point,
    k_min: f64,
    k_max: f64,
    dim: Dim,
    opts: OracleOptions,
) -> Result<Complex64> {
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) {
        return Err(QdsmError::domain(format!(
            "need 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    let n = dim.value() as i32;
    let integrand = |k: f64| -> Result<Complex64> {
        let inner = sphere_integral(|theta| far_field(theta, k) * Complex64::from_polar(1.0, -2.0 * k * dot(theta, z)), dim, &opts)?;
        Ok(inner * k.powi(n - 3) / gamma_unchecked(k, dim))
    };
    let pieces = ((k_max - k_min) / 2.0).ceil().max(4.0) as usize;
    let v = gauss_kronrod_adaptive(integrand, k_min, k_max, pieces, opts.rel_tol, opts.max_subintervals)?;
    Ok(v / PI.powi(n))
}
