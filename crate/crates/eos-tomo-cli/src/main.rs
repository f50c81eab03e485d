use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use eos_tomo::commands;
use eos_tomo::config::ConfigDocument;
use eos_tomo::io::{ArtifactWriter, Provenance};
use eos_tomo::{Error, Result};

/// Subcycle electro-optic tomography: spectra, decompositions, count
/// statistics, sampling and waveform reconstruction.
#[derive(Debug, Parser)]
#[command(name = "eos-tomo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// JSA with its phase-matching and pump factors versus Ω.
    ModeSpectrum(Common),
    /// θ⁽¹⁾, |ζ_S| and ζ_T over a grid of probe and pump frequencies.
    SqueezeMap(Common),
    /// Numeric and analytic A_SA, A_TH traces.
    Coefficients(Common),
    /// Coefficient maxima and relative errors for a ladder of pump bandwidths.
    Table1(Common),
    /// Count-probability lattice at one delay.
    Countdist(Common),
    /// Monte Carlo detector shots at one delay.
    Sample(Common),
    /// Delay sweep and Gaussian waveform fit.
    Reconstruct(Common),
    /// Check a configuration and print it with all defaults filled in.
    Validate(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::ModeSpectrum(c) => ("mode-spectrum", c),
            Command::SqueezeMap(c) => ("squeeze-map", c),
            Command::Coefficients(c) => ("coefficients", c),
            Command::Table1(c) => ("table1", c),
            Command::Countdist(c) => ("countdist", c),
            Command::Sample(c) => ("sample", c),
            Command::Reconstruct(c) => ("reconstruct", c),
            Command::Validate(c) => ("validate", c),
        }
    }
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON configuration document.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides run.seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(name: &str, args: &Common) -> Result<serde_json::Value> {
    let mut doc = ConfigDocument::load(&args.config)?;
    if let Some(seed) = args.seed {
        doc.run.seed = seed;
    }
    if name == "validate" {
        return commands::validate(&doc);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::Config {
                path: "--threads".into(),
                message: "must be at least 1".into(),
            });
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    let mut out = ArtifactWriter::new(&args.out, Provenance::new(name, doc.resolved()))?;
    pool.install(|| commands::run(name, &doc, &mut out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = cli.command.parts();
    match execute(name, args) {
        Ok(summary) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("eos-tomo {name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
