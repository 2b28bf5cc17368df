//! Analytic contrast phantoms and their rasterization.
//!
//! A phantom is a pointwise map `x ↦ q(x)` together with the radius of an
//! origin-centered ball outside of which `q` is zero. Smooth (Gaussian-type)
//! phantoms are clamped to zero where their envelope has fallen below 1e-14
//! of the peak amplitude.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QdsmError, Result};
use crate::field::ComplexField;
use crate::geometry::{norm, sub, Dim, Point, SamplingGrid};

type ContrastFn = dyn Fn(&Point) -> Complex64 + Send + Sync;

/// Relative level below which a smooth envelope counts as zero.
const ENVELOPE_FLOOR: f64 = 1e-14;

#[derive(Clone)]
pub struct ContrastPhantom {
    dim: Dim,
    support_radius: f64,
    label: String,
    notes: Vec<String>,
    eval: Arc<ContrastFn>,
}

impl fmt::Debug for ContrastPhantom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContrastPhantom")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("support_radius", &self.support_radius)
            .field("notes", &self.notes)
            .finish()
    }
}

impl ContrastPhantom {
    pub fn new(
        dim: Dim,
        support_radius: f64,
        label: impl Into<String>,
        eval: impl Fn(&Point) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            support_radius,
            label: label.into(),
            notes: Vec::new(),
            eval: Arc::new(eval),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Modelling choices recorded with the phantom.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// q(x); zero outside the support ball.
    #[inline]
    pub fn eval(&self, x: &Point) -> Complex64 {
        if norm(x) > self.support_radius {
            Complex64::new(0.0, 0.0)
        } else {
            (self.eval)(x)
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let inner = self.eval.clone();
        Self {
            dim: self.dim,
            support_radius: self.support_radius,
            label: format!("{}*({})", self.label, factor),
            notes: self.notes.clone(),
            eval: Arc::new(move |x| factor * inner(x)),
        }
    }

    /// x ↦ q(x − t).
    pub fn shifted(&self, t: Point) -> Self {
        let inner = self.clone();
        Self {
            dim: self.dim,
            support_radius: self.support_radius + norm(&t),
            label: format!("{} shifted by {:?}", self.label, &t[..self.dim.value()]),
            notes: self.notes.clone(),
            eval: Arc::new(move |x| inner.eval(&sub(x, &t))),
        }
    }

    pub fn plus(&self, other: &ContrastPhantom) -> Result<Self> {
        if self.dim != other.dim {
            return Err(QdsmError::DimensionMismatch {
                expected: self.dim.value(),
                found: other.dim.value(),
            });
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self {
            dim: self.dim,
            support_radius: self.support_radius.max(other.support_radius),
            label: format!("{} + {}", self.label, other.label),
            notes: self.notes.iter().chain(&other.notes).cloned().collect(),
            eval: Arc::new(move |x| a.eval(x) + b.eval(x)),
        })
    }

    /// Checks Re q > −1 and Im q ≥ 0 (up to 1e-15) at every point of `grid`.
    pub fn check_admissible(&self, grid: &SamplingGrid) -> Result<()> {
        let field = rasterize(self, grid)?;
        for (i, v) in field.values().iter().enumerate() {
            if !(v.re > -1.0 && v.im >= -1e-15 && v.re.is_finite() && v.im.is_finite()) {
                return Err(QdsmError::domain(format!(
                    "phantom `{}` is not admissible at {:?}: q = {v}",
                    self.label,
                    grid.point(i)
                )));
            }
        }
        Ok(())
    }
}

/// Samples the phantom at every grid point.
pub fn rasterize(phantom: &ContrastPhantom, grid: &SamplingGrid) -> Result<ComplexField> {
    if grid.dim() != phantom.dim() {
        return Err(QdsmError::DimensionMismatch {
            expected: phantom.dim().value(),
            found: grid.dim().value(),
        });
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| phantom.eval(&grid.point(i)))
        .collect();
    ComplexField::new(grid.clone(), values)
}

/// Radius beyond which `amplitude · e^{−decay·|x − c|²}` stays below `floor`.
fn gaussian_reach(center_dist: f64, amplitude: f64, decay: f64, floor: f64) -> f64 {
    let ratio = amplitude / floor;
    if ratio <= 1.0 {
        return center_dist;
    }
    center_dist + (ratio.ln() / decay).sqrt()
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

pub fn zero(dim: Dim) -> ContrastPhantom {
    ContrastPhantom::new(dim, 0.0, "zero", |_| Complex64::new(0.0, 0.0))
}

/// `amplitude · e^{−a|x − center|²}`; its Fourier integral is closed-form.
pub fn gaussian_bump(dim: Dim, amplitude: Complex64, center: Point, a: f64) -> Result<ContrastPhantom> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(QdsmError::domain(format!(
            "Gaussian decay must be positive, got {a}"
        )));
    }
    let mut c = center;
    if dim == Dim::Two {
        c[2] = 0.0;
    }
    let reach = gaussian_reach(norm(&c), 1.0, a, ENVELOPE_FLOOR);
    Ok(ContrastPhantom::new(dim, reach, "gaussian_bump", move |x| {
        let d = sub(x, &c);
        amplitude * (-a * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2])).exp()
    }))
}

/// Closed form of ∫ q(y) e^{2ikθ·y} dy for [`gaussian_bump`]:
/// `amplitude (π/a)^{n/2} e^{−k²/a} e^{2ikθ·center}`.
pub fn gaussian_fourier(dim: Dim, amplitude: Complex64, center: &Point, a: f64, theta: &Point, k: f64) -> Complex64 {
    let n = dim.value() as f64;
    let proj = theta[0] * center[0] + theta[1] * center[1] + if dim == Dim::Three { theta[2] * center[2] } else { 0.0 };
    amplitude * (PI / a).powf(n / 2.0) * (-k * k / a).exp() * Complex64::from_polar(1.0, 2.0 * k * proj)
}

/// Smooth complex 2D contrast: a Gaussian plus a saddle-shaped term in the
/// real part and four positive Gaussians (scaled by 10⁻²) in the imaginary part.
pub fn complex_mountain_2d() -> ContrastPhantom {
    // |x₂² − x₁²| e^{−90|x|²} ≤ e^{−80|x|²} / (10e)
    let terms = [
        (norm(&[0.01, 0.12, 0.0]), 1.1e-2, 200.0),
        (0.0, 1.0 / (10.0 * std::f64::consts::E), 80.0),
        (norm(&[0.2, 0.2, 0.0]), 0.9e-2, 100.0),
        (norm(&[-0.15, 0.15, 0.0]), 1.1e-2, 250.0),
        (norm(&[-0.2, -0.2, 0.0]), 1.3e-2, 150.0),
        (0.25, 1e-2, 50.0),
    ];
    let floor = ENVELOPE_FLOOR * 1e-2;
    let reach = terms
        .iter()
        .map(|&(c, amp, a)| gaussian_reach(c, amp, a, floor))
        .fold(0.0, f64::max);
    ContrastPhantom::new(Dim::Two, reach, "complex_mountain_2d", |x| {
        let (x1, x2) = (x[0], x[1]);
        let re = 1.1e-2 * (-200.0 * (sq(x1 - 0.01) + sq(x2 - 0.12))).exp()
            - (x2 * x2 - x1 * x1) * (-90.0 * (x1 * x1 + x2 * x2)).exp();
        let im = 1e-2
            * (0.9 * (-100.0 * (sq(x1 - 0.2) + sq(x2 - 0.2))).exp()
                + 1.1 * (-250.0 * (sq(x1 + 0.15) + sq(x2 - 0.15))).exp()
                + 1.3 * (-150.0 * (sq(x1 + 0.2) + 2.0 * sq(x2 + 0.2))).exp()
                + (-50.0 * (sq(x1 - 0.25) + x2 * x2)).exp());
        Complex64::new(re, im)
    })
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Aabb {
    fn contains(&self, x: &Point) -> bool {
        (0..3).all(|a| self.lo[a] <= x[a] && x[a] <= self.hi[a])
    }

    fn volume(&self) -> f64 {
        (0..3).map(|a| self.hi[a] - self.lo[a]).product()
    }

    fn far_corner(&self) -> f64 {
        (0..3)
            .map(|a| sq(self.lo[a].abs().max(self.hi[a].abs())))
            .sum::<f64>()
            .sqrt()
    }
}

const S: f64 = 1.0 / 16.0;
const CROSS_BARS: [Aabb; 3] = [
    Aabb {
        lo: [-3.0 * S, -S, -S],
        hi: [4.0 * S, S, S],
    },
    Aabb {
        lo: [-S, -3.0 * S, -S],
        hi: [S, 4.0 * S, S],
    },
    Aabb {
        lo: [-S, -S, -3.0 * S],
        hi: [S, S, 4.0 * S],
    },
];
const CROSS_VALUES: [f64; 3] = [8e-3, 6e-3, 1e-2];

/// Three perpendicular bars of length 7/16 and width 1/8 with values
/// 8e-3 (Ω₁∖Ω₂), 6e-3 (Ω₂∖Ω₁) and 1e-2 (Ω₃). The hollow variant removes the
/// shared center cube Ω₁∩Ω₂ from Ω₃.
pub fn cross_3d(hollow: bool) -> ContrastPhantom {
    let [b1, b2, b3] = CROSS_BARS;
    let [v1, v2, v3] = CROSS_VALUES;
    let reach = CROSS_BARS.iter().map(Aabb::far_corner).fold(0.0, f64::max);
    let label = if hollow { "cross_3d_hollow" } else { "cross_3d" };
    ContrastPhantom::new(Dim::Three, reach, label, move |x| {
        let (in1, in2, in3) = (b1.contains(x), b2.contains(x), b3.contains(x));
        let mut q = 0.0;
        if in1 && !in2 {
            q += v1;
        }
        if in2 && !in1 {
            q += v2;
        }
        if in3 && !(hollow && in1 && in2) {
            q += v3;
        }
        Complex64::new(q, 0.0)
    })
}

/// ∫ q dy of [`cross_3d`] from the box volumes.
pub fn cross_3d_mass(hollow: bool) -> f64 {
    let center = (2.0 * S).powi(3);
    let arm1 = CROSS_BARS[0].volume() - center;
    let arm2 = CROSS_BARS[1].volume() - center;
    let vertical = CROSS_BARS[2].volume() - if hollow { center } else { 0.0 };
    CROSS_VALUES[0] * arm1 + CROSS_VALUES[1] * arm2 + CROSS_VALUES[2] * vertical
}

/// Smooth complex 3D contrast `C_s q*(x)`, a Gaussian-modulated polynomial
/// family. The bare `x/5` in the real part is read as `x₁/5`.
pub fn smooth_3d(scale: f64) -> Result<ContrastPhantom> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(QdsmError::domain(format!(
            "scale factor must be positive, got {scale}"
        )));
    }
    // amplitude bounds valid on |x| ≤ 1, which every reach below stays inside
    let terms = [
        (0.1, 12.0, 500.0),
        (0.1, 30.0, 300.0),
        (0.1, 1.0 / 3.0, 450.0),
        (0.05, 3.0, 200.0),
        (0.1, 5.0, 180.0),
    ];
    let floor = ENVELOPE_FLOOR * 5.0;
    let reach = terms
        .iter()
        .map(|&(c, amp, a)| gaussian_reach(c, amp, a, floor))
        .fold(0.0, f64::max);
    let p = ContrastPhantom::new(Dim::Three, reach, format!("smooth_3d(C_s={scale})"), move |x| {
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        let re = 3.0 * sq(1.0 - x1) * (-500.0 * x1 * x1 - 800.0 * sq(x2 - 0.1) - 600.0 * x3 * x3).exp()
            - 10.0
                * (x1 / 5.0 - x1.powi(3) - x2.powi(5))
                * (-400.0 * sq(x1 - 0.1) - 300.0 * x2 * x2 - 500.0 * x3 * x3).exp()
            - (1.0 / 3.0) * (-450.0 * sq(x1 - 0.1) - 600.0 * x2 * x2 - 700.0 * x3 * x3).exp();
        let im = 3.0 * (-300.0 * x1 * x1 - 200.0 * sq(x2 + 0.05) - 350.0 * x3 * x3).exp()
            + 5.0 * (-180.0 * sq(x1 - 0.1) - 350.0 * x2 * x2 - 250.0 * x3 * x3).exp();
        Complex64::new(scale * re, scale * im)
    });
    Ok(p.with_note("real part term 10(x/5 - x1^3 - x2^5) evaluated with x/5 := x1/5"))
}

/// (intensity, semi-axis a, semi-axis b, x₀, y₀, rotation in degrees) of the
/// modified Shepp–Logan head on [−1, 1]².
const SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
];

/// Spatial shrink applied to the unit Shepp–Logan head so that it fits
/// inside the disk of radius 0.7 with some margin.
pub const SHEPP_LOGAN_EXTENT: f64 = 0.6;

/// Modified Shepp–Logan head, shrunk by [`SHEPP_LOGAN_EXTENT`] and multiplied by `scale`.
pub fn shepp_logan_2d(scale: f64) -> Result<ContrastPhantom> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(QdsmError::domain(format!(
            "Shepp-Logan scale must be positive, got {scale}"
        )));
    }
    let ellipses: Vec<_> = SHEPP_LOGAN
        .iter()
        .map(|&(v, a, b, x0, y0, deg)| {
            let (s, c) = deg.to_radians().sin_cos();
            (v, a, b, x0, y0, c, s)
        })
        .collect();
    let reach = SHEPP_LOGAN_EXTENT * 0.92;
    Ok(ContrastPhantom::new(
        Dim::Two,
        reach,
        format!("shepp_logan_2d(scale={scale})"),
        move |p| {
            let x = p[0] / SHEPP_LOGAN_EXTENT;
            let y = p[1] / SHEPP_LOGAN_EXTENT;
            let mut v = 0.0;
            for &(val, a, b, x0, y0, c, s) in &ellipses {
                let dx = x - x0;
                let dy = y - y0;
                let xr = dx * c + dy * s;
                let yr = -dx * s + dy * c;
                if sq(xr / a) + sq(yr / b) <= 1.0 {
                    v += val;
                }
            }
            Complex64::new(scale * v, 0.0)
        },
    ))
}

/// A sparse 2D scene: an L-shaped corner whose value grows linearly toward
/// its elbow, a constant disk, and a broken corner built from small squares
/// joined by a thin line. Peak value 10⁻².
pub fn blocks_sparse_2d() -> ContrastPhantom {
    let rect = |x: &Point, x0: f64, x1: f64, y0: f64, y1: f64| {
        x0 <= x[0] && x[0] <= x1 && y0 <= x[1] && x[1] <= y1
    };
    let squares: [(f64, f64); 6] = [
        (0.05, -0.55),
        (0.17, -0.55),
        (0.29, -0.55),
        (0.41, -0.55),
        (0.41, -0.43),
        (0.41, -0.31),
    ];
    let reach = norm(&[-0.55, 0.55, 0.0]);
    ContrastPhantom::new(Dim::Two, reach, "blocks_sparse_2d", move |x| {
        let mut v = 0.0;
        // L-shaped corner: vertical and horizontal arms meeting at the top left
        let in_l = rect(x, -0.55, -0.43, 0.15, 0.55) || rect(x, -0.55, -0.15, 0.43, 0.55);
        if in_l {
            let t = ((x[0] + 0.55) + (x[1] - 0.15)) / 0.8;
            v += 1e-2 * (0.4 + 0.6 * t);
        }
        if sq(x[0] - 0.25) + sq(x[1] - 0.25) <= sq(0.17) {
            v += 0.8e-2;
        }
        if squares
            .iter()
            .any(|&(sx, sy)| rect(x, sx, sx + 0.08, sy, sy + 0.08))
        {
            v += 0.6e-2;
        }
        // thin line closing the broken corner
        if rect(x, 0.47, 0.49, -0.2, -0.05) || rect(x, 0.05, 0.47, -0.07, -0.05) {
            v += 0.9e-2;
        }
        Complex64::new(v, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gaussian_peak_and_support() {
        let g = gaussian_bump(Dim::Two, c(0.01), [0.0; 3], 100.0).unwrap();
        assert_eq!(g.eval(&[0.0; 3]), c(0.01));
        let r = g.support_radius();
        assert!(((-100.0 * r * r).exp() - 1e-14).abs() < 1e-20);
        assert_eq!(g.eval(&[r + 1e-9, 0.0, 0.0]), c(0.0));
        assert!(gaussian_bump(Dim::Two, c(1.0), [0.0; 3], 0.0).is_err());
    }

    #[test]
    fn gaussian_fourier_value() {
        let v = gaussian_fourier(Dim::Two, c(0.01), &[0.0; 3], 100.0, &[1.0, 0.0, 0.0], 1.0);
        assert!((v.norm() - 3.1103e-4).abs() < 1e-8);
        let want = 0.01 * PI / 100.0 * (-0.01f64).exp();
        assert!((v.re - want).abs() < 1e-18);
    }

    #[test]
    fn mountain_values() {
        let q = complex_mountain_2d();
        let at = q.eval(&[0.2, 0.2, 0.0]);
        assert!(at.im >= 0.009);
        let origin = q.eval(&[0.0; 3]);
        let want = 1.1e-2 * (-200.0 * (0.01f64 * 0.01 + 0.12 * 0.12)).exp();
        assert!((origin.re - want).abs() < 1e-18);
        assert!(q.support_radius() > 1.0 && q.support_radius() < 1.1);
    }

    #[test]
    fn cross_block_values() {
        let solid = cross_3d(false);
        let hollow = cross_3d(true);
        assert_eq!(solid.eval(&[0.2, 0.0, 0.0]).re, 8e-3);
        assert_eq!(solid.eval(&[0.0, 0.2, 0.0]).re, 6e-3);
        assert_eq!(solid.eval(&[0.0, 0.0, 0.2]).re, 1e-2);
        assert_eq!(solid.eval(&[0.0; 3]).re, 1e-2);
        assert_eq!(hollow.eval(&[0.0; 3]).re, 0.0);
        assert_eq!(hollow.eval(&[0.0, 0.0, -0.1]).re, 1e-2);
        assert_eq!(solid.eval(&[0.2, 0.2, 0.0]).re, 0.0);
    }

    #[test]
    fn cross_mass_from_box_volumes() {
        let v = 0.4375 * 0.125 * 0.125 - 0.125f64.powi(3);
        let want = 8e-3 * v + 6e-3 * v + 1e-2 * 0.0068359375;
        assert!((cross_3d_mass(false) - want).abs() < 1e-18);
        assert!((cross_3d_mass(true) - (want - 1e-2 * 0.125f64.powi(3))).abs() < 1e-18);
    }

    #[test]
    fn cross_mass_exact_on_face_aligned_raster() {
        // cell faces at multiples of 1/128 contain every bar face
        let grid = SamplingGrid::cell_centered(Dim::Three, 1.0 / 128.0, 51).unwrap();
        assert!(grid.counts()[0] >= 101);
        for hollow in [false, true] {
            let f = rasterize(&cross_3d(hollow), &grid).unwrap();
            let mass: f64 = f.values().iter().map(|v| v.re).sum::<f64>() * grid.cell_volume();
            let want = cross_3d_mass(hollow);
            assert!(((mass - want) / want).abs() < 5e-3, "hollow={hollow}: {mass} vs {want}");
        }
    }

    #[test]
    fn cross_on_reference_grid_hits_block_values() {
        let grid = SamplingGrid::cube(Dim::Three, -0.35, 0.35, 101).unwrap();
        let f = rasterize(&cross_3d(false), &grid).unwrap();
        let mut seen = [false; 3];
        for (i, v) in f.values().iter().enumerate() {
            let p = grid.point(i);
            for (slot, want) in CROSS_VALUES.iter().enumerate() {
                if v.re == *want {
                    seen[slot] = true;
                }
            }
            assert!(v.re == 0.0 || CROSS_VALUES.contains(&v.re), "{p:?}: {v}");
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn smooth_3d_values() {
        let q = smooth_3d(1.0).unwrap();
        let im = q.eval(&[0.0; 3]).im;
        let want = 3.0 * (-200.0f64 * 0.0025).exp() + 5.0 * (-180.0f64 * 0.01).exp();
        assert!((im - want).abs() < 1e-14);
        let a = smooth_3d(0.1).unwrap();
        let b = smooth_3d(0.01).unwrap();
        for x in [[0.05, -0.02, 0.01], [0.1, 0.1, 0.0], [-0.07, 0.03, 0.04]] {
            let (va, vb) = (a.eval(&x), b.eval(&x));
            assert!((va - 10.0 * vb).norm() < 1e-15 * va.norm().max(1.0));
        }
        assert!(!q.notes().is_empty());
        assert!(smooth_3d(0.0).is_err());
    }

    #[test]
    fn shepp_logan_support_and_regions() {
        let q = shepp_logan_2d(0.01).unwrap();
        assert_eq!(q.eval(&[0.0, 0.65, 0.0]).re, 0.0);
        assert_eq!(q.eval(&[0.5, 0.5, 0.0]).re, 0.0);
        // two points inside the brain matter region away from inner ellipses
        let a = q.eval(&[0.0, -0.3, 0.0]).re;
        let b = q.eval(&[0.02, -0.32, 0.0]).re;
        assert_eq!(a, b);
        assert!((a - 0.01 * 0.2).abs() < 1e-15);
        assert!(q.support_radius() <= 0.7);
        // plane integral by a fine midpoint rule
        let grid = SamplingGrid::cube(Dim::Two, -0.7, 0.7, 401).unwrap();
        let f = rasterize(&q, &grid).unwrap();
        let mass: f64 = f.values().iter().map(|v| v.re).sum::<f64>() * grid.cell_volume();
        assert!(mass > 0.0);
    }

    #[test]
    fn blocks_sparse_layout() {
        let q = blocks_sparse_2d();
        let d1 = q.eval(&[0.25, 0.25, 0.0]);
        let d2 = q.eval(&[0.3, 0.2, 0.0]);
        assert_eq!(d1, d2);
        let grid = SamplingGrid::cube(Dim::Two, -0.7, 0.7, 281).unwrap();
        let f = rasterize(&q, &grid).unwrap();
        let peak = f.values().iter().map(|v| v.re).fold(0.0, f64::max);
        assert!((peak - 1e-2).abs() < 1e-3, "peak {peak}");
        // everything inside the sampling square
        let wide = SamplingGrid::cube(Dim::Two, -1.0, 1.0, 201).unwrap();
        let f = rasterize(&q, &wide).unwrap();
        for (i, v) in f.values().iter().enumerate() {
            if v.re != 0.0 {
                let p = wide.point(i);
                assert!(p[0].abs() <= 0.7 && p[1].abs() <= 0.7);
            }
        }
    }

    #[test]
    fn builtins_are_admissible() {
        let g2 = SamplingGrid::cube(Dim::Two, -1.1, 1.1, 111).unwrap();
        let g3 = SamplingGrid::cube(Dim::Three, -0.6, 0.6, 41).unwrap();
        for p in [
            complex_mountain_2d(),
            shepp_logan_2d(0.01).unwrap(),
            blocks_sparse_2d(),
            gaussian_bump(Dim::Two, c(0.01), [0.1, 0.0, 0.0], 100.0).unwrap(),
        ] {
            p.check_admissible(&g2).unwrap();
        }
        for p in [
            cross_3d(false),
            cross_3d(true),
            smooth_3d(0.01).unwrap(),
            smooth_3d(0.1).unwrap(),
        ] {
            p.check_admissible(&g3).unwrap();
        }
    }

    #[test]
    fn rasterize_linear_and_checks_dim() {
        let grid = SamplingGrid::cube(Dim::Two, -0.5, 0.5, 21).unwrap();
        let z = rasterize(&zero(Dim::Two), &grid).unwrap();
        assert!(z.values().iter().all(|v| *v == c(0.0)));
        let q = complex_mountain_2d();
        let s = Complex64::new(2.5, -1.0);
        let a = rasterize(&q.scaled(s), &grid).unwrap();
        let b = rasterize(&q, &grid).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - s * y).norm() <= 1e-15 * x.norm().max(1e-300));
        }
        let g3 = SamplingGrid::cube(Dim::Three, -0.5, 0.5, 5).unwrap();
        assert!(rasterize(&q, &g3).is_err());
    }
}
