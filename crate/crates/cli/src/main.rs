//! `sepstrip` command-line interface.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical failures
//! (and, with `--strict`, for tolerances that were not met).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "sepstrip",
    version,
    about = "Separatrix strips and right inverses for p(t)∂t + q(t)∂x"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Directory for reports, CSV and SVG files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Exit with code 3 when a checked tolerance is not met.
    #[arg(long, global = true)]
    strict: bool,
    /// Seed for random probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Overrides the residual tolerance of the problem file.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Roots, residues, strips and the surjectivity verdict.
    Classify,
    /// Integral curves as CSV and SVG.
    Curves,
    /// Global weak right inverse with residual, gluing and closed-form checks.
    Solve,
    /// Fitted singular exponents at the separatrix roots.
    Asymptotics,
    /// Picard iteration for a zero-order perturbation.
    Perturb,
    /// Kernel, right-inverse, weak-pairing and flux checks.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Curves => "curves",
            Command::Solve => "solve",
            Command::Asymptotics => "asymptotics",
            Command::Perturb => "perturb",
            Command::Verify => "verify",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(spec) = cli.spec.as_deref() else {
        eprintln!("error: --spec <file> is required");
        return ExitCode::from(2);
    };
    let opts = commands::Options {
        out: cli.out.clone(),
        seed: cli.seed,
        tol: cli.tol,
    };
    match commands::run(cli.command, spec, &opts) {
        Ok(outcome) => {
            println!("{}", outcome.report);
            if outcome.passed || !cli.strict {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: tolerance not met");
                ExitCode::from(3)
            }
        }
        Err(failure) => {
            if let Some(report) = &failure.report {
                println!("{report}");
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
