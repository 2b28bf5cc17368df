//! Files, configuration and the end-to-end pipeline behind the `qdsm` binary.

pub mod config;
pub mod format;
pub mod pipeline;
pub mod render;
pub mod validate;

pub use config::{apply_overrides, PhantomSpec, Plan, RunConfig};
pub use format::{export_field, export_measurements, read_field_binary, read_field_text, read_measurements};
pub use pipeline::{run_invert, run_phantom, run_pipeline, run_synthesize, Artifact, Manifest, MANIFEST_NAME};
pub use render::{render_slices, slice_image, SliceSpec};
pub use validate::{run_validation, OracleCheck, ValidationReport};

/// Environment variable holding the worker-thread count.
pub const THREADS_VAR: &str = "QDSM_THREADS";

/// Sizes the global worker pool from `QDSM_THREADS`; unset or empty uses
/// every available core. Calling it more than once keeps the first pool.
pub fn configure_threads() -> crate::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    if raw.trim().is_empty() {
        return Ok(());
    }
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| crate::QdsmError::Config(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
