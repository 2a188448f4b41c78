// SPDX-License-Identifier: AGPL-3.0-only

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasigraph::commands::{self, Command};
use quasigraph::config::{OutputFormat, Overrides, RunConfig};
use quasigraph::{Error, Site};

#[derive(Parser)]
#[command(name = "quasigraph", version, about = "Quasiperiodic quantum graphs with Maryland-type couplings")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the phase and Diophantine conditions on the frequency vector.
    Validate(Common),
    /// Eigenvalues λ(m) for |m| ≤ index radius in every gap of the window.
    Spectrum(Common),
    /// σ, σ′ and quadrature error across one gap.
    SigmaCurve(Common),
    /// Vertex values and edge profiles of one eigenfunction.
    Eigenfunction(Common),
    /// Dense-truncation defect across one gap.
    DefectScan(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    gap: Option<usize>,
    #[arg(long)]
    index_radius: Option<usize>,
    /// Eigenvector and oracle box radius.
    #[arg(long = "box")]
    box_radius: Option<usize>,
    /// Grid size, or samples per edge for `eigenfunction`.
    #[arg(long)]
    samples: Option<usize>,
    /// Lattice index for `eigenfunction`, e.g. 3 or 1:-2.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_invalid_input() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Cmd::Validate(a) => (Command::Validate, a),
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::SigmaCurve(a) => (Command::SigmaCurve, a),
        Cmd::Eigenfunction(a) => (Command::Eigenfunction, a),
        Cmd::DefectScan(a) => (Command::DefectScan, a),
    };
    let index = match args.m.as_deref().map(Site::parse).transpose() {
        Ok(s) => s.map(|s| s.coords().to_vec()),
        Err(e) => return exit_for(&Error::Config(e.to_string())),
    };
    let overrides = Overrides {
        gap: args.gap,
        index_radius: args.index_radius,
        box_radius: args.box_radius,
        samples: args.samples,
        index,
        format: args.format.map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }),
        out: args.out,
    };
    let cfg = match RunConfig::load(&args.config).and_then(|mut c| c.apply(&overrides).map(|_| c)) {
        Ok(c) => c,
        Err(e) => return exit_for(&e),
    };
    match commands::run(cmd, &cfg).and_then(|o| o.write(&cfg).map(|p| (o, p))) {
        Ok((outcome, path)) => {
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => exit_for(&e),
    }
}
