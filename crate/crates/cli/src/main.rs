//! `qdsm`: configuration-driven synthesis, inversion and validation runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qdsm_core::io::{self, Manifest, RunConfig};
use qdsm_core::QdsmError;

#[derive(Parser)]
#[command(name = "qdsm", version, about = "Quantitative direct sampling for inverse medium scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize the phantom on the sampling grid and render it.
    Phantom(RunArgs),
    /// Write the (noisy) backscattering measurement matrix.
    Synthesize(RunArgs),
    /// Reconstruct from the measurement file named by `measurements`.
    Invert(RunArgs),
    /// Synthesize, add noise, invert and compare against the truth.
    Pipeline(RunArgs),
    /// Run the oracle suite; with a config, also write `validation.json` to its output directory.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration field, e.g. `--set noise.delta=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn summarize(manifest: &Manifest) {
    println!("{}: {} artifacts", manifest.command, manifest.artifacts.len());
    for a in &manifest.artifacts {
        println!("  {}  {}", a.sha256, a.path);
    }
    if let Some(r) = &manifest.report {
        let kind = if r.absolute { "absolute" } else { "relative" };
        println!("  {kind} l2 error {:.6e}, linf error {:.6e}", r.rel_l2, r.rel_linf);
        if let Some(b) = r.bound_theorem4 {
            println!("  truncation bound {b:.6e}");
        }
    }
    for n in &manifest.notes {
        println!("  note: {n}");
    }
}

fn validate(args: &ValidateArgs) -> anyhow::Result<bool> {
    let config = args
        .config
        .as_ref()
        .map(|p| RunConfig::load(p, &args.overrides))
        .transpose()?;
    let report = io::run_validation()?;
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:<28} {:.3e} (tolerance {:.1e})", c.name, c.value, c.tolerance);
    }
    if let Some(cfg) = config {
        std::fs::create_dir_all(&cfg.output_dir)
            .map_err(|e| QdsmError::Io { path: cfg.output_dir.clone(), source: e })?;
        let path = cfg.output_dir.join("validation.json");
        let text = serde_json::to_string_pretty(&report)? + "\n";
        std::fs::write(&path, text).map_err(|e| QdsmError::Io { path, source: e })?;
    }
    Ok(report.passed())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    io::configure_threads()?;
    let (args, runner): (&RunArgs, fn(&RunConfig) -> qdsm_core::Result<Manifest>) = match &cli.command {
        Command::Phantom(a) => (a, io::run_phantom),
        Command::Synthesize(a) => (a, io::run_synthesize),
        Command::Invert(a) => (a, io::run_invert),
        Command::Pipeline(a) => (a, io::run_pipeline),
        Command::Validate(a) => return validate(a),
    };
    let config = RunConfig::load(&args.config, &args.overrides)?;
    let manifest = runner(&config)?;
    summarize(&manifest);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(err) => {
            eprintln!("error: {err}");
            let code = err.downcast_ref::<QdsmError>().map_or(1, QdsmError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
