//! Plain-text PPM slices of fields with a fixed diverging colormap.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{QdsmError, Result};
use crate::field::{ComplexField, FieldPart};
use crate::geometry::{Dim, SamplingGrid};

/// Colormap anchors at t = 0, 1/2 and 1.
pub const COLORMAP: [(f64, [u8; 3]); 3] = [
    (0.0, [59, 76, 192]),
    (0.5, [221, 221, 221]),
    (1.0, [180, 4, 38]),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub part: FieldPart,
    /// Normal axis of a 3D slice; ignored in 2D.
    #[serde(default)]
    pub axis: usize,
    /// Coordinate of the slice plane along `axis`; ignored in 2D.
    #[serde(default)]
    pub coordinate: f64,
}

/// Maps t ∈ [0, 1] through the piecewise-linear diverging colormap.
pub fn colormap(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let (lo, hi) = if t <= 0.5 { (COLORMAP[0], COLORMAP[1]) } else { (COLORMAP[1], COLORMAP[2]) };
    let s = (t - lo.0) / (hi.0 - lo.0);
    let mut rgb = [0u8; 3];
    for c in 0..3 {
        rgb[c] = (lo.1[c] as f64 + s * (hi.1[c] as f64 - lo.1[c] as f64)).round() as u8;
    }
    rgb
}

/// The pixels of a slice, row 0 at the top (largest second in-plane coordinate).
#[derive(Debug, Clone, PartialEq)]
pub struct SliceImage {
    pub width: usize,
    pub height: usize,
    pub min: f64,
    pub max: f64,
    pub pixels: Vec<[u8; 3]>,
}

/// In-plane column and row axes of a slice, plus the fixed (axis, index) in 3D.
pub(crate) fn slice_plane(grid: &SamplingGrid, spec: &SliceSpec) -> Result<(usize, usize, Option<(usize, usize)>)> {
    let counts = grid.counts();
    Ok(match grid.dim() {
        Dim::Two => (0, 1, None),
        Dim::Three => {
            if spec.axis > 2 {
                return Err(QdsmError::domain(format!(
                    "slice axis must be 0, 1 or 2, got {}",
                    spec.axis
                )));
            }
            let a = spec.axis;
            let h = grid.spacing(a);
            let pos = (spec.coordinate - grid.axis_min()[a]) / h;
            let nearest = pos.round();
            if !(nearest >= 0.0 && nearest < counts[a] as f64) || (pos - nearest).abs() > 1e-9 {
                let lo = pos.floor().clamp(0.0, counts[a] as f64 - 1.0) as usize;
                let hi = pos.ceil().clamp(0.0, counts[a] as f64 - 1.0) as usize;
                return Err(QdsmError::domain(format!(
                    "slice coordinate {} is not on a grid plane of axis {a}; nearest planes are {} and {}",
                    spec.coordinate,
                    grid.coord(a, lo),
                    grid.coord(a, hi)
                )));
            }
            let others: Vec<usize> = (0..3).filter(|&b| b != a).collect();
            (others[0], others[1], Some((a, nearest as usize)))
        }
    })
}

/// Extracts the requested plane and colors it over its own [min, max].
pub fn slice_image(field: &ComplexField, spec: &SliceSpec) -> Result<SliceImage> {
    let grid = field.grid();
    let counts = grid.counts();
    let (cols_axis, rows_axis, fixed) = slice_plane(grid, spec)?;
    let width = counts[cols_axis];
    let height = counts[rows_axis];
    let mut values = Vec::with_capacity(width * height);
    for r in 0..height {
        let row_idx = height - 1 - r;
        for c in 0..width {
            let mut idx = [0usize; 3];
            idx[cols_axis] = c;
            idx[rows_axis] = row_idx;
            if let Some((a, i)) = fixed {
                idx[a] = i;
            }
            let flat = grid.flat_index(&idx[..grid.dim().value()]);
            values.push(spec.part.of(field.values()[flat]));
        }
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pixels = values
        .iter()
        .map(|v| colormap(if max > min { (v - min) / (max - min) } else { 0.5 }))
        .collect();
    Ok(SliceImage {
        width,
        height,
        min,
        max,
        pixels,
    })
}

/// Writes `<stem>.ppm` (P3) and `<stem>.txt` (range and anchors); returns both paths.
pub fn render_slices(field: &ComplexField, spec: &SliceSpec, stem: &Path) -> Result<(PathBuf, PathBuf)> {
    let img = slice_image(field, spec)?;
    let ppm = stem.with_extension("ppm");
    let side = stem.with_extension("txt");
    let mut s = String::with_capacity(12 * img.pixels.len() + 32);
    let _ = writeln!(s, "P3\n{} {}\n255", img.width, img.height);
    for row in img.pixels.chunks(img.width) {
        let line: Vec<String> = row.iter().map(|p| format!("{} {} {}", p[0], p[1], p[2])).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    if let Some(parent) = ppm.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| QdsmError::io(parent, e))?;
        }
    }
    fs::write(&ppm, s).map_err(|e| QdsmError::io(&ppm, e))?;

    let mut meta = String::new();
    let _ = writeln!(meta, "part {}", spec.part.name());
    if field.grid().dim() == Dim::Three {
        let _ = writeln!(meta, "axis {}", spec.axis);
        let _ = writeln!(meta, "coordinate {:.16e}", spec.coordinate);
    }
    let _ = writeln!(meta, "min {:.16e}", img.min);
    let _ = writeln!(meta, "max {:.16e}", img.max);
    for (t, rgb) in COLORMAP {
        let _ = writeln!(meta, "anchor {t} {} {} {}", rgb[0], rgb[1], rgb[2]);
    }
    fs::write(&side, meta).map_err(|e| QdsmError::io(&side, e))?;
    Ok((ppm, side))
}
