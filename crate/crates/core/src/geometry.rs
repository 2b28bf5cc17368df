//! Sampling grids, direction sets and wavenumber sets.
//!
//! Points are stored as `[f64; 3]` in both dimensions; in 2D the third
//! component is identically zero, so dot products and norms need no
//! dimension dispatch.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{QdsmError, Result};

pub type Point = [f64; 3];

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Spatial dimension of a problem. Only the plane and space are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn value(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Measure of the unit sphere S^{n-1}.
    pub fn sphere_measure(self) -> f64 {
        match self {
            Dim::Two => 2.0 * PI,
            Dim::Three => 4.0 * PI,
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = QdsmError;

    fn try_from(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(QdsmError::domain(format!(
                "dimension must be 2 or 3, got {other}"
            ))),
        }
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.value()
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}D", self.value())
    }
}

/// A rectangular, closed-interval grid: both endpoints of every axis are grid
/// points. Flat indices are row-major (the last axis varies fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    dim: Dim,
    axis_min: Vec<f64>,
    axis_max: Vec<f64>,
    counts: Vec<usize>,
}

impl SamplingGrid {
    pub fn new(dim: Dim, axis_min: Vec<f64>, axis_max: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let n = dim.value();
        if axis_min.len() != n || axis_max.len() != n || counts.len() != n {
            return Err(QdsmError::domain(format!(
                "grid axes must have {n} entries each"
            )));
        }
        for a in 0..n {
            if !(axis_min[a].is_finite() && axis_max[a].is_finite() && axis_min[a] < axis_max[a]) {
                return Err(QdsmError::domain(format!(
                    "axis {a}: need finite min < max, got [{}, {}]",
                    axis_min[a], axis_max[a]
                )));
            }
            if counts[a] < 2 {
                return Err(QdsmError::domain(format!(
                    "axis {a}: need at least 2 points, got {}",
                    counts[a]
                )));
            }
        }
        Ok(Self {
            dim,
            axis_min,
            axis_max,
            counts,
        })
    }

    /// The cube `[min, max]^n` with `count` points per axis.
    pub fn cube(dim: Dim, min: f64, max: f64, count: usize) -> Result<Self> {
        let n = dim.value();
        Self::new(dim, vec![min; n], vec![max; n], vec![count; n])
    }

    /// A grid whose points are the centers of `2 * half_cells` cells of width
    /// `h` per axis, symmetric about the origin. Cell faces then sit at integer
    /// multiples of `h`.
    pub fn cell_centered(dim: Dim, h: f64, half_cells: usize) -> Result<Self> {
        let edge = (half_cells as f64 - 0.5) * h;
        Self::cube(dim, -edge, edge, 2 * half_cells)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn axis_min(&self) -> &[f64] {
        &self.axis_min
    }

    pub fn axis_max(&self) -> &[f64] {
        &self.axis_max
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.axis_max[axis] - self.axis_min[axis]) / (self.counts[axis] - 1) as f64
    }

    /// Coordinate of the `i`-th plane along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.axis_min[axis] + i as f64 * self.spacing(axis)
    }

    /// Volume (area in 2D) of one grid cell, used as the midpoint quadrature weight.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim.value()).map(|a| self.spacing(a)).product()
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rem = flat;
        for a in (0..self.dim.value()).rev() {
            idx[a] = rem % self.counts[a];
            rem /= self.counts[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &c)| acc * c + i)
    }

    pub fn point(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let mut p = [0.0; 3];
        for (a, c) in p.iter_mut().enumerate().take(self.dim.value()) {
            *c = self.coord(a, idx[a]);
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Radius of the smallest origin-centered ball containing the grid box.
    pub fn bounding_radius(&self) -> f64 {
        (0..self.dim.value())
            .map(|a| {
                let r = self.axis_min[a].abs().max(self.axis_max[a].abs());
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Whether the origin-centered ball of radius `r` lies inside the grid box.
    pub fn contains_ball(&self, r: f64) -> bool {
        (0..self.dim.value()).all(|a| self.axis_min[a] <= -r && self.axis_max[a] >= r)
    }
}

/// Unit vectors on S^{n-1} sharing one uniform quadrature weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    dim: Dim,
    dirs: Vec<Point>,
    weight: f64,
}

impl DirectionSet {
    /// Builds a set from explicit unit vectors with the uniform weight
    /// `|S^{n-1}| / len`.
    pub fn from_vectors(dim: Dim, dirs: Vec<Point>) -> Result<Self> {
        if dirs.is_empty() {
            return Err(QdsmError::domain("direction set must not be empty"));
        }
        for (j, d) in dirs.iter().enumerate() {
            if (norm(d) - 1.0).abs() > 1e-12 || (dim == Dim::Two && d[2] != 0.0) {
                return Err(QdsmError::domain(format!(
                    "direction {j} is not a unit vector in {dim}"
                )));
            }
        }
        let weight = dim.sphere_measure() / dirs.len() as f64;
        Ok(Self { dim, dirs, weight })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn dirs(&self) -> &[Point] {
        &self.dirs
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}

/// `n_theta` equally spaced angles on [0, 2π) starting at angle zero.
pub fn uniform_circle_directions(n_theta: usize) -> Result<DirectionSet> {
    if n_theta == 0 {
        return Err(QdsmError::domain("need at least one direction"));
    }
    let step = 2.0 * PI / n_theta as f64;
    let dirs = (0..n_theta)
        .map(|j| {
            let t = j as f64 * step;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    Ok(DirectionSet {
        dim: Dim::Two,
        dirs,
        weight: step,
    })
}

/// Fibonacci lattice on S²: for ℓ = 1..=L,
/// x₃ = 1 − 2ℓ/L and azimuth (√5 − 1)πℓ. The last point is the south pole.
pub fn fibonacci_sphere_directions(l: usize) -> Result<DirectionSet> {
    if l == 0 {
        return Err(QdsmError::domain("need at least one lattice point"));
    }
    let golden = (5f64.sqrt() - 1.0) * PI;
    let dirs = (1..=l)
        .map(|ell| {
            let x3 = 1.0 - 2.0 * ell as f64 / l as f64;
            let rho = (1.0 - x3 * x3).max(0.0).sqrt();
            let phi = golden * ell as f64;
            [rho * phi.cos(), rho * phi.sin(), x3]
        })
        .collect();
    Ok(DirectionSet {
        dim: Dim::Three,
        dirs,
        weight: 4.0 * PI / l as f64,
    })
}

/// Equidistant wavenumbers k_m = k_min + (m − 1)Δk on [k_min, k_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavenumberSet {
    k_min: f64,
    k_max: f64,
    values: Vec<f64>,
    dk: f64,
}

pub fn make_wavenumbers(k_min: f64, k_max: f64, n_k: usize) -> Result<WavenumberSet> {
    if !(k_min > 0.0 && k_min.is_finite()) {
        return Err(QdsmError::domain(format!(
            "k_min must be positive, got {k_min}"
        )));
    }
    if !(k_max > k_min && k_max.is_finite()) {
        return Err(QdsmError::domain(format!(
            "k_max must exceed k_min, got [{k_min}, {k_max}]"
        )));
    }
    if n_k < 2 {
        return Err(QdsmError::domain(format!("n_k must be at least 2, got {n_k}")));
    }
    let dk = (k_max - k_min) / (n_k - 1) as f64;
    let mut values: Vec<f64> = (0..n_k).map(|m| k_min + m as f64 * dk).collect();
    // pin the right endpoint against accumulated rounding
    values[n_k - 1] = k_max;
    Ok(WavenumberSet {
        k_min,
        k_max,
        values,
        dk,
    })
}

impl WavenumberSet {
    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Far-field (plane-wave incidence, u^∞(−θ, θ, k)) or near-field
/// (co-located point source and receiver on the sphere |x| = R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementGeometry {
    FarField,
    NearField { radius: f64 },
}

impl MeasurementGeometry {
    /// Checks that a near-field sphere encloses a support ball of radius `support_radius`.
    pub fn check_encloses(&self, support_radius: f64) -> Result<()> {
        match *self {
            MeasurementGeometry::FarField => Ok(()),
            MeasurementGeometry::NearField { radius } => {
                if radius.is_finite() && radius > support_radius {
                    Ok(())
                } else {
                    Err(QdsmError::domain(format!(
                        "measurement radius {radius} must exceed the support radius {support_radius}"
                    )))
                }
            }
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            MeasurementGeometry::FarField => None,
            MeasurementGeometry::NearField { radius } => Some(radius),
        }
    }
}
