use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};

use asota::manifest::{Manifest, Sources};
use asota::report::{run, Command, ReportBundle, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Ingest,
    Index,
    Inputs,
    Fit,
    Scaling,
    All,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Ingest => Command::Ingest,
            Cmd::Index => Command::Index,
            Cmd::Inputs => Command::Inputs,
            Cmd::Fit => Command::Fit,
            Cmd::Scaling => Command::Scaling,
            Cmd::All => Command::All,
        }
    }
}

/// Benchmark indices, compute-capital inputs, production and scaling-law fits.
#[derive(Debug, Parser)]
#[command(name = "asota", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// TOML manifest mapping data roles to files.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory; overrides the manifest's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Track the running maximum even for loss-like metrics.
    #[arg(long)]
    strict_formula: bool,
    /// Fraction of the compute stock devoted to AI work.
    #[arg(long)]
    phi_ai: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let manifest = match Manifest::load(&cli.manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: manifest: {e}");
            return ExitCode::from(2);
        }
    };
    let out = cli
        .out
        .clone()
        .or_else(|| manifest.output_dir.as_ref().map(|d| manifest.root.join(d)))
        .unwrap_or_else(|| PathBuf::from("out"));
    let opts = RunOptions {
        strict_formula: cli.strict_formula,
        phi_ai: cli.phi_ai,
    };
    let sources = Sources::new(&manifest);
    let mut bundle = ReportBundle::new();
    let result = run(cli.command.into(), &sources, &opts, &mut bundle);
    log::info!("roles read: {}", sources.accessed().join(", "));

    if !bundle.is_empty() {
        if let Err(e) = bundle
            .write_to(&out)
            .with_context(|| format!("writing outputs to {}", out.display()))
        {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    match result {
        Ok(()) => {
            println!("wrote {} files to {}", bundle.len() + 1, out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
