//! Batch front end for `gpembed-core`. Every command writes one JSON document
//! that embeds a [`RunManifest`]; `replay` re-runs a manifest.

mod commands;
pub mod error;
pub mod manifest;

use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use gpembed_core::Rational;

pub use error::CliError;
pub use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "gpembed", version, about = "Certified general-position embeddings of finite complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Subdivide a complex or map, then perturb it into general position in R^m
    Embed(EmbedArgs),
    /// Secant lines through one point, with zero-dimensionality certificate
    Analyze(AnalyzeArgs),
    /// Sweep seeded probe points and certify each
    Probe(ProbeArgs),
    /// Nerve complex of a ball cover of a point cloud
    Nerve(NerveArgs),
    /// Fiberwise embedding and eta-filtered secant reports
    Fibered(FiberedArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Complex or map JSON
    pub input: String,
    /// Target dimension; defaults to the file's `m`
    #[arg(long)]
    pub m: Option<usize>,
    /// Closeness target, e.g. 1/10
    #[arg(long)]
    pub delta: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Map JSON, or the output of `embed`
    #[arg(long)]
    pub map: String,
    /// Probe point as comma-separated rationals
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Radius of the ball clipping lines for the metric
    #[arg(long, default_value = "10")]
    pub k: Rational,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub k: Rational,
    #[arg(long)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Also write one CSV row per sample
    #[arg(long)]
    pub csv: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct NerveArgs {
    /// CSV of sample points, one per row
    #[arg(long)]
    pub points: String,
    #[arg(long)]
    pub radius: Rational,
    /// `{"B1": [...], "B2": [...]}` row indices
    #[arg(long)]
    pub marks: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct FiberedArgs {
    #[arg(long)]
    pub instance: String,
    #[arg(long)]
    pub delta: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub k: Rational,
    /// Probe points per fiber
    #[arg(long)]
    pub samples: usize,
    /// Comma-separated thresholds; defaults to the instance's, else 1,1/2,1/4
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<Rational>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    /// A manifest, or any output embedding one
    #[arg(long)]
    pub manifest: String,
    #[arg(long)]
    pub out: Option<String>,
}

/// Runs a parsed command. `args` is the argument list after the program name,
/// recorded in the manifest.
pub fn run(cli: Cli, args: &[String]) -> Result<(), CliError> {
    let (value, out) = match &cli.command {
        Command::Embed(a) => (commands::embed(a, args)?, a.out.as_deref()),
        Command::Analyze(a) => (commands::analyze(a, args)?, a.out.as_deref()),
        Command::Probe(a) => (commands::probe(a, args)?, a.out.as_deref()),
        Command::Nerve(a) => (commands::nerve(a, args)?, a.out.as_deref()),
        Command::Fibered(a) => (commands::fibered(a, args)?, a.out.as_deref()),
        Command::Replay(a) => return replay(a),
    };
    emit(&value, out)
}

fn replay(a: &ReplayArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.manifest).map_err(|e| CliError::io(&a.manifest, e))?;
    let manifest = RunManifest::from_json_str(&text)?;
    if manifest.tool != manifest::TOOL {
        return Err(CliError::Invalid(format!("manifest was written by {:?}", manifest.tool)));
    }
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!("warning: manifest version {} differs from {}", manifest.version, env!("CARGO_PKG_VERSION"));
    }
    manifest.verify_inputs()?;
    let mut args = manifest.args.clone();
    if let Some(out) = &a.out {
        args.extend(["--out".to_string(), out.clone()]);
    }
    let argv = std::iter::once(manifest::TOOL.to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Invalid(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Invalid("a manifest cannot record a replay".into()));
    }
    run(cli, &args)
}

fn emit(value: &serde_json::Value, out: Option<&str>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}
