//! End-to-end runs: synthesize, perturb, invert, compare, and write every
//! artifact together with a hashed manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{Plan, RunConfig};
use super::format::{export_field, export_measurements, read_measurements};
use super::render::render_slices;
use crate::analysis::{h2_norm, l2_norm, rel_errors, rel_errors_part, truncation_bound, ErrorReport};
use crate::error::{QdsmError, Result};
use crate::field::{ComplexField, FieldPart};
use crate::forward::{add_noise, synthesize, MeasurementSet};
use crate::inversion::indicator;
use crate::phantoms::rasterize;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the output directory, with `/` separators.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: RunConfig,
    pub artifacts: Vec<Artifact>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ErrorReport>,
    pub notes: Vec<String>,
}

struct Outputs {
    root: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| QdsmError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn stem(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn push(&mut self, paths: (PathBuf, PathBuf)) {
        self.files.push(paths.0);
        self.files.push(paths.1);
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let path = self.root.join(name);
        let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
        fs::write(&path, text).map_err(|e| QdsmError::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    fn finish(self, command: &str, config: &RunConfig, report: Option<ErrorReport>, notes: Vec<String>) -> Result<Manifest> {
        let mut artifacts = Vec::with_capacity(self.files.len());
        for f in &self.files {
            let bytes = fs::read(f).map_err(|e| QdsmError::io(f, e))?;
            let rel = f.strip_prefix(&self.root).unwrap_or(f);
            artifacts.push(Artifact {
                path: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
                sha256: hex::encode(Sha256::digest(&bytes)),
                bytes: bytes.len() as u64,
            });
        }
        let manifest = Manifest {
            command: command.to_string(),
            config: config.clone(),
            artifacts,
            report,
            notes,
        };
        let path = self.root.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
        fs::write(&path, text).map_err(|e| QdsmError::io(&path, e))?;
        Ok(manifest)
    }
}

fn plan(config: &RunConfig) -> Result<Plan> {
    config.plan()
}

fn measure(plan: &Plan) -> Result<MeasurementSet> {
    let clean = synthesize(
        &plan.phantom,
        plan.geometry,
        &plan.directions,
        &plan.wavenumbers,
        &plan.forward_grid,
        plan.model,
    )
    .map_err(|e| e.at_stage("synthesize"))?;
    add_noise(&clean, plan.noise.delta, plan.noise.seed).map_err(|e| e.at_stage("add_noise"))
}

fn render_all(out: &mut Outputs, field: &ComplexField, plan: &Plan, prefix: &str) -> Result<()> {
    for (i, spec) in plan.slices.iter().enumerate() {
        let name = format!("{prefix}_slice{i}_{}", spec.part.name());
        out.push(render_slices(field, spec, &out.stem(&name)).map_err(|e| e.at_stage("render"))?);
    }
    Ok(())
}

fn compare(reconstruction: &ComplexField, truth: &ComplexField, plan: &Plan) -> Result<ErrorReport> {
    let mut report = rel_errors(reconstruction, truth)?;
    let re = rel_errors_part(reconstruction, truth, FieldPart::Re)?;
    let ks = &plan.wavenumbers;
    let dim = plan.sampling_grid.dim();
    if !report.absolute {
        let h2 = h2_norm(truth)?;
        let bound = truncation_bound(h2.value, l2_norm(truth), ks.k_min(), ks.k_max(), dim)?;
        report.bound_theorem4 = Some(bound);
        report.metadata.insert("h2_norm".into(), h2.value.into());
        report.metadata.insert("h2_boundary_warning".into(), h2.boundary_warning.into());
        report.metadata.insert("l2_norm".into(), l2_norm(truth).into());
    }
    report.metadata.insert("rel_l2_re".into(), re.rel_l2.into());
    report.metadata.insert("rel_linf_re".into(), re.rel_linf.into());
    report.metadata.insert("phantom".into(), plan.phantom.label().into());
    report.metadata.insert("n_directions".into(), plan.directions.len().into());
    report.metadata.insert("n_wavenumbers".into(), ks.len().into());
    report.metadata.insert("k_min".into(), ks.k_min().into());
    report.metadata.insert("k_max".into(), ks.k_max().into());
    report.metadata.insert("noise_delta".into(), plan.noise.delta.into());
    Ok(report)
}

/// Rasterizes the phantom on the sampling grid and renders it.
pub fn run_phantom(config: &RunConfig) -> Result<Manifest> {
    let plan = plan(config)?;
    let mut out = Outputs::new(&config.output_dir)?;
    let truth = rasterize(&plan.phantom, &plan.sampling_grid).map_err(|e| e.at_stage("rasterize"))?;
    out.push(export_field(&truth, &out.stem("truth"))?);
    render_all(&mut out, &truth, &plan, "truth")?;
    out.finish("phantom", config, None, plan.phantom.notes().to_vec())
}

/// Synthesizes (and perturbs) the measurement matrix.
pub fn run_synthesize(config: &RunConfig) -> Result<Manifest> {
    let plan = plan(config)?;
    let mut out = Outputs::new(&config.output_dir)?;
    let m = measure(&plan)?;
    out.push(export_measurements(&m, &out.stem("measurements"))?);
    out.finish("synthesize", config, None, plan.phantom.notes().to_vec())
}

/// Inverts the measurement file named in the configuration.
pub fn run_invert(config: &RunConfig) -> Result<Manifest> {
    let plan = plan(config)?;
    let path = config
        .measurements
        .as_ref()
        .ok_or_else(|| QdsmError::Config("measurements: an input file is required for `invert`".into()))?;
    let m = read_measurements(path).map_err(|e| e.at_stage("read_measurements"))?;
    if m.directions().dim() != plan.sampling_grid.dim() {
        return Err(QdsmError::Config(format!(
            "measurements: data are {} but the configuration is {}",
            m.directions().dim(),
            plan.sampling_grid.dim()
        )));
    }
    let mut out = Outputs::new(&config.output_dir)?;
    let rec = indicator(&m, &plan.sampling_grid).map_err(|e| e.at_stage("invert"))?;
    out.push(export_field(&rec, &out.stem("reconstruction"))?);
    render_all(&mut out, &rec, &plan, "reconstruction")?;
    out.finish("invert", config, None, Vec::new())
}

/// All stages: synthesize, add noise, invert, rasterize the truth, compare.
pub fn run_pipeline(config: &RunConfig) -> Result<Manifest> {
    let plan = plan(config)?;
    let mut out = Outputs::new(&config.output_dir)?;
    let m = measure(&plan)?;
    out.push(export_measurements(&m, &out.stem("measurements"))?);

    let rec = indicator(&m, &plan.sampling_grid).map_err(|e| e.at_stage("invert"))?;
    let truth = rasterize(&plan.phantom, &plan.sampling_grid).map_err(|e| e.at_stage("rasterize"))?;
    out.push(export_field(&rec, &out.stem("reconstruction"))?);
    out.push(export_field(&truth, &out.stem("truth"))?);

    let report = compare(&rec, &truth, &plan).map_err(|e| e.at_stage("analysis"))?;
    out.write_json("error_report.json", &report)?;
    render_all(&mut out, &rec, &plan, "reconstruction")?;
    render_all(&mut out, &truth, &plan, "truth")?;
    let mut notes = plan.phantom.notes().to_vec();
    if report.absolute {
        notes.push("reference contrast is identically zero; errors are absolute".into());
    }
    out.finish("pipeline", config, Some(report), notes)
}
