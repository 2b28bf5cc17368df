//! Text and binary serializations of fields and measurement sets.
//!
//! Text tables carry `#` header lines followed by whitespace-separated
//! columns, with every float printed to 17 significant digits. Binary
//! companions hold the same information as little-endian words so that a
//! round trip is bit-exact.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{QdsmError, Result};
use crate::field::ComplexField;
use crate::forward::MeasurementSet;
use crate::geometry::{make_wavenumbers, Dim, DirectionSet, MeasurementGeometry, Point, SamplingGrid};

pub const FIELD_MAGIC: &[u8; 8] = b"QDSMFLD1";
pub const MEASUREMENT_MAGIC: &[u8; 8] = b"QDSMMEA1";

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| QdsmError::io(parent, e))?;
        }
    }
    Ok(BufWriter::new(fs::File::create(path).map_err(|e| QdsmError::io(path, e))?))
}

fn format_err(path: &Path, reason: impl Into<String>) -> QdsmError {
    QdsmError::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Writes `<stem>.txt` and `<stem>.bin` and returns both paths.
pub fn export_field(field: &ComplexField, stem: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    let txt = stem.with_extension("txt");
    let bin = stem.with_extension("bin");
    write_field_text(field, &txt)?;
    write_field_binary(field, &bin)?;
    Ok((txt, bin))
}

pub fn write_field_text(field: &ComplexField, path: &Path) -> Result<()> {
    let grid = field.grid();
    let n = grid.dim().value();
    let mut w = create(path)?;
    let join = |v: Vec<String>| v.join(" ");
    let body = (|| -> std::io::Result<()> {
        writeln!(w, "# qdsm field v1")?;
        writeln!(w, "# dim {n}")?;
        writeln!(w, "# counts {}", join(grid.counts().iter().map(|c| c.to_string()).collect()))?;
        writeln!(w, "# min {}", join(grid.axis_min().iter().map(|v| format!("{v:.16e}")).collect()))?;
        writeln!(w, "# max {}", join(grid.axis_max().iter().map(|v| format!("{v:.16e}")).collect()))?;
        let names = ["x1", "x2", "x3"];
        writeln!(w, "# columns {} re im", names[..n].join(" "))?;
        for (i, v) in field.values().iter().enumerate() {
            let p = grid.point(i);
            for c in &p[..n] {
                write!(w, "{c:.16e} ")?;
            }
            writeln!(w, "{:.16e} {:.16e}", v.re, v.im)?;
        }
        w.flush()
    })();
    body.map_err(|e| QdsmError::io(path, e))
}

pub fn write_field_binary(field: &ComplexField, path: &Path) -> Result<()> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(64 + 16 * field.len());
    buf.extend_from_slice(FIELD_MAGIC);
    buf.extend_from_slice(&(grid.dim().value() as u32).to_le_bytes());
    for c in grid.counts() {
        buf.extend_from_slice(&(*c as u64).to_le_bytes());
    }
    for v in grid.axis_min().iter().chain(grid.axis_max()) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut w = create(path)?;
    w.write_all(&buf).and_then(|_| w.flush()).map_err(|e| QdsmError::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.bytes.len() {
            return Err(format_err(self.path, "unexpected end of file"));
        }
        let s = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn finish(&self) -> Result<()> {
        if self.at != self.bytes.len() {
            return Err(format_err(self.path, "trailing bytes after payload"));
        }
        Ok(())
    }
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| QdsmError::io(path, e))?;
    Ok(bytes)
}

fn read_dim(c: &mut Cursor<'_>, path: &Path) -> Result<Dim> {
    Dim::try_from(c.u32()? as usize).map_err(|e| format_err(path, e.to_string()))
}

pub fn read_field_binary(path: &Path) -> Result<ComplexField> {
    let bytes = read_all(path)?;
    let mut c = Cursor {
        bytes: &bytes,
        at: 0,
        path,
    };
    if c.take(8)? != FIELD_MAGIC {
        return Err(format_err(path, "not a qdsm field file"));
    }
    let dim = read_dim(&mut c, path)?;
    let n = dim.value();
    let counts = (0..n).map(|_| c.u64().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let mins = (0..n).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
    let maxs = (0..n).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
    let grid = SamplingGrid::new(dim, mins, maxs, counts).map_err(|e| format_err(path, e.to_string()))?;
    let values = (0..grid.len())
        .map(|_| Ok(Complex64::new(c.f64()?, c.f64()?)))
        .collect::<Result<Vec<_>>>()?;
    c.finish()?;
    ComplexField::new(grid, values)
}

fn header_value<'a>(headers: &'a [String], key: &str, path: &Path) -> Result<&'a str> {
    headers
        .iter()
        .find_map(|h| h.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .ok_or_else(|| format_err(path, format!("missing header `{key}`")))
}

fn parse_list<T: std::str::FromStr>(s: &str, path: &Path) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| format_err(path, format!("bad number `{t}`"))))
        .collect()
}

fn read_text(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let f = fs::File::open(path).map_err(|e| QdsmError::io(path, e))?;
    let mut headers = Vec::new();
    let mut rows = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line.map_err(|e| QdsmError::io(path, e))?;
        if let Some(h) = line.strip_prefix("# ") {
            headers.push(h.to_string());
        } else if !line.trim().is_empty() {
            rows.push(parse_list(&line, path)?);
        }
    }
    Ok((headers, rows))
}

pub fn read_field_text(path: &Path) -> Result<ComplexField> {
    let (headers, rows) = read_text(path)?;
    let dim = Dim::try_from(parse_list::<usize>(header_value(&headers, "dim", path)?, path)?[0])
        .map_err(|e| format_err(path, e.to_string()))?;
    let counts = parse_list(header_value(&headers, "counts", path)?, path)?;
    let mins = parse_list(header_value(&headers, "min", path)?, path)?;
    let maxs = parse_list(header_value(&headers, "max", path)?, path)?;
    let grid = SamplingGrid::new(dim, mins, maxs, counts).map_err(|e| format_err(path, e.to_string()))?;
    let n = dim.value();
    let values = rows
        .iter()
        .map(|r| {
            if r.len() != n + 2 {
                return Err(format_err(path, format!("expected {} columns, found {}", n + 2, r.len())));
            }
            Ok(Complex64::new(r[n], r[n + 1]))
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexField::new(grid, values).map_err(|e| format_err(path, e.to_string()))
}

fn geometry_header(g: &MeasurementGeometry) -> String {
    match g {
        MeasurementGeometry::FarField => "far_field".into(),
        MeasurementGeometry::NearField { radius } => format!("near_field {radius:.16e}"),
    }
}

/// Writes `<stem>.txt` and `<stem>.bin` and returns both paths.
pub fn export_measurements(m: &MeasurementSet, stem: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    let txt = stem.with_extension("txt");
    let bin = stem.with_extension("bin");
    write_measurements_text(m, &txt)?;
    write_measurements_binary(m, &bin)?;
    Ok((txt, bin))
}

pub fn write_measurements_text(m: &MeasurementSet, path: &Path) -> Result<()> {
    let n = m.directions().dim().value();
    let ks = m.wavenumbers();
    let mut w = create(path)?;
    let body = (|| -> std::io::Result<()> {
        writeln!(w, "# qdsm measurements v1")?;
        writeln!(w, "# dim {n}")?;
        writeln!(w, "# geometry {}", geometry_header(m.geometry()))?;
        writeln!(w, "# n_theta {}", m.n_theta())?;
        writeln!(w, "# wavenumbers {:.16e} {:.16e} {}", ks.k_min(), ks.k_max(), ks.len())?;
        match m.seed() {
            Some(s) => writeln!(w, "# noise {:.16e} {s}", m.noise_level())?,
            None => writeln!(w, "# noise {:.16e}", m.noise_level())?,
        }
        let names = ["theta1", "theta2", "theta3"];
        writeln!(w, "# columns j m k {} re im", names[..n].join(" "))?;
        for (j, theta) in m.directions().dirs().iter().enumerate() {
            for (mm, k) in ks.values().iter().enumerate() {
                write!(w, "{j} {mm} {k:.16e} ")?;
                for t in &theta[..n] {
                    write!(w, "{t:.16e} ")?;
                }
                let v = m.at(j, mm);
                writeln!(w, "{:.16e} {:.16e}", v.re, v.im)?;
            }
        }
        w.flush()
    })();
    body.map_err(|e| QdsmError::io(path, e))
}

pub fn write_measurements_binary(m: &MeasurementSet, path: &Path) -> Result<()> {
    let n = m.directions().dim().value();
    let ks = m.wavenumbers();
    let mut buf = Vec::with_capacity(128 + 16 * m.data().len() + 8 * n * m.n_theta());
    buf.extend_from_slice(MEASUREMENT_MAGIC);
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    let (kind, radius) = match m.geometry() {
        MeasurementGeometry::FarField => (0u32, 0.0),
        MeasurementGeometry::NearField { radius } => (1u32, *radius),
    };
    buf.extend_from_slice(&kind.to_le_bytes());
    buf.extend_from_slice(&radius.to_le_bytes());
    buf.extend_from_slice(&(m.n_theta() as u64).to_le_bytes());
    buf.extend_from_slice(&(ks.len() as u64).to_le_bytes());
    buf.extend_from_slice(&ks.k_min().to_le_bytes());
    buf.extend_from_slice(&ks.k_max().to_le_bytes());
    buf.extend_from_slice(&m.noise_level().to_le_bytes());
    buf.push(m.seed().is_some() as u8);
    buf.extend_from_slice(&m.seed().unwrap_or(0).to_le_bytes());
    for theta in m.directions().dirs() {
        for t in &theta[..n] {
            buf.extend_from_slice(&t.to_le_bytes());
        }
    }
    for v in m.data() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut w = create(path)?;
    w.write_all(&buf).and_then(|_| w.flush()).map_err(|e| QdsmError::io(path, e))
}

pub fn read_measurements_binary(path: &Path) -> Result<MeasurementSet> {
    let bytes = read_all(path)?;
    let mut c = Cursor {
        bytes: &bytes,
        at: 0,
        path,
    };
    if c.take(8)? != MEASUREMENT_MAGIC {
        return Err(format_err(path, "not a qdsm measurement file"));
    }
    let dim = read_dim(&mut c, path)?;
    let n = dim.value();
    let kind = c.u32()?;
    let radius = c.f64()?;
    let geometry = match kind {
        0 => MeasurementGeometry::FarField,
        1 => MeasurementGeometry::NearField { radius },
        other => return Err(format_err(path, format!("unknown geometry tag {other}"))),
    };
    let n_theta = c.u64()? as usize;
    let n_k = c.u64()? as usize;
    let (k_min, k_max) = (c.f64()?, c.f64()?);
    let noise = c.f64()?;
    let has_seed = c.u8()? != 0;
    let seed = c.u64()?;
    let mut dirs: Vec<Point> = Vec::with_capacity(n_theta);
    for _ in 0..n_theta {
        let mut p = [0.0; 3];
        for v in p.iter_mut().take(n) {
            *v = c.f64()?;
        }
        dirs.push(p);
    }
    let data = (0..n_theta * n_k)
        .map(|_| Ok(Complex64::new(c.f64()?, c.f64()?)))
        .collect::<Result<Vec<_>>>()?;
    c.finish()?;
    let wrap = |e: QdsmError| format_err(path, e.to_string());
    let directions = DirectionSet::from_vectors(dim, dirs).map_err(wrap)?;
    let ks = make_wavenumbers(k_min, k_max, n_k).map_err(wrap)?;
    let mut m = MeasurementSet::new(geometry, directions, ks, data).map_err(wrap)?;
    m.set_noise(noise, has_seed.then_some(seed));
    Ok(m)
}

pub fn read_measurements_text(path: &Path) -> Result<MeasurementSet> {
    let (headers, rows) = read_text(path)?;
    let wrap = |e: QdsmError| format_err(path, e.to_string());
    let dim = Dim::try_from(parse_list::<usize>(header_value(&headers, "dim", path)?, path)?[0]).map_err(wrap)?;
    let n = dim.value();
    let geom = header_value(&headers, "geometry", path)?;
    let geometry = match geom.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["far_field"] => MeasurementGeometry::FarField,
        ["near_field", r] => MeasurementGeometry::NearField {
            radius: r.parse().map_err(|_| format_err(path, "bad radius"))?,
        },
        _ => return Err(format_err(path, format!("bad geometry header `{geom}`"))),
    };
    let n_theta: usize = parse_list::<usize>(header_value(&headers, "n_theta", path)?, path)?[0];
    let kspec: Vec<f64> = parse_list(header_value(&headers, "wavenumbers", path)?, path)?;
    if kspec.len() != 3 {
        return Err(format_err(path, "wavenumbers header needs k_min k_max n_k"));
    }
    let n_k = kspec[2] as usize;
    let noise_tokens: Vec<&str> = header_value(&headers, "noise", path)?.split_whitespace().collect();
    let delta: f64 = noise_tokens
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format_err(path, "bad noise header"))?;
    let seed = match noise_tokens.get(1) {
        Some(t) => Some(t.parse::<u64>().map_err(|_| format_err(path, "bad noise seed"))?),
        None => None,
    };
    if rows.len() != n_theta * n_k {
        return Err(format_err(path, format!("expected {} rows, found {}", n_theta * n_k, rows.len())));
    }
    let mut dirs = vec![[0.0; 3]; n_theta];
    let mut data = vec![Complex64::new(0.0, 0.0); n_theta * n_k];
    for r in &rows {
        if r.len() != n + 5 {
            return Err(format_err(path, format!("expected {} columns, found {}", n + 5, r.len())));
        }
        let (j, mm) = (r[0] as usize, r[1] as usize);
        if j >= n_theta || mm >= n_k {
            return Err(format_err(path, format!("index ({j}, {mm}) out of range")));
        }
        dirs[j][..n].copy_from_slice(&r[3..3 + n]);
        data[j * n_k + mm] = Complex64::new(r[3 + n], r[4 + n]);
    }
    let directions = DirectionSet::from_vectors(dim, dirs).map_err(wrap)?;
    let ks = make_wavenumbers(kspec[0], kspec[1], n_k).map_err(wrap)?;
    let mut m = MeasurementSet::new(geometry, directions, ks, data).map_err(wrap)?;
    m.set_noise(delta, seed);
    Ok(m)
}

/// Reads either format, chosen by the `.bin` / `.txt` extension.
pub fn read_measurements(path: &Path) -> Result<MeasurementSet> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => read_measurements_binary(path),
        Some("txt") => read_measurements_text(path),
        _ => Err(format_err(path, "measurement files must end in .bin or .txt")),
    }
}
