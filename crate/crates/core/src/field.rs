use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QdsmError, Result};
use crate::geometry::{Point, SamplingGrid};

/// Complex values on a [`SamplingGrid`], row-major in the grid's multi-index.
///
/// Both rasterized contrasts and indicator outputs use this type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexField {
    grid: SamplingGrid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: SamplingGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(QdsmError::domain(format!(
                "field has {} values but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SamplingGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `self + other` on a shared grid.
    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn check_same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid != other.grid {
            return Err(QdsmError::domain("fields live on different grids"));
        }
        Ok(())
    }

    /// Nonzero samples with their positions; the sparse form used by the
    /// forward quadratures.
    pub fn support_samples(&self) -> Vec<(Point, Complex64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|(i, &v)| (self.grid.point(i), v))
            .collect()
    }

    /// Largest distance from the origin of a nonzero sample (0 for a zero field).
    pub fn support_radius(&self) -> f64 {
        self.support_samples()
            .iter()
            .map(|(p, _)| crate::geometry::norm(p))
            .fold(0.0, f64::max)
    }
}

/// A real projection of a complex field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldPart {
    Re,
    Im,
    Abs,
}

impl FieldPart {
    #[inline]
    pub fn of(self, z: Complex64) -> f64 {
        match self {
            FieldPart::Re => z.re,
            FieldPart::Im => z.im,
            FieldPart::Abs => z.norm(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldPart::Re => "re",
            FieldPart::Im => "im",
            FieldPart::Abs => "abs",
        }
    }
}

impl std::str::FromStr for FieldPart {
    type Err = QdsmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "re" | "real" => Ok(FieldPart::Re),
            "im" | "imag" => Ok(FieldPart::Im),
            "abs" => Ok(FieldPart::Abs),
            other => Err(QdsmError::domain(format!(
                "unknown field part `{other}` (expected re, im or abs)"
            ))),
        }
    }
}
