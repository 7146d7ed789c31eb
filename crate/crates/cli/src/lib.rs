//! Configuration-driven front end for `ultraspec`.
//!
//! Every subcommand reads one JSON [`RunConfig`](config::RunConfig) and writes
//! CSV artifacts into the output directory.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use commands::Context;
pub use config::RunConfig;
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "ultraspec", version, about = "Ultracontractive spectral decay and its functional inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and the spectral decay F.
    Spectrum(Common),
    /// G, H, N, L̂ and M̂ on grids.
    Profiles(Common),
    /// Certification suite; exits 1 on a theorem-backed failure.
    Certify(Common),
    /// Densities, fits and Sobolev brackets along a quotient tower.
    Scaling(Common),
    /// Monte-Carlo density of a polynomial symbol on ℝⁿ.
    Continuum(Common),
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory (default: the config's `output`, relative to the config).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Spectrum(c)
            | Command::Profiles(c)
            | Command::Certify(c)
            | Command::Scaling(c)
            | Command::Continuum(c) => c,
        }
    }
}

/// How a successful run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    BackedFailure,
}

pub fn run(command: &Command) -> Result<Outcome> {
    let common = command.common();
    let (config, base) = RunConfig::load(&common.config)?;
    let ctx = Context::new(config, base, common.out.clone(), common.seed);
    let job = || -> Result<Outcome> {
        match command {
            Command::Spectrum(_) => commands::cmd_spectrum(&ctx).map(|_| Outcome::Clean),
            Command::Profiles(_) => commands::cmd_profiles(&ctx).map(|_| Outcome::Clean),
            Command::Certify(_) => {
                let (path, report) = commands::cmd_certify(&ctx)?;
                if report.failed() {
                    for r in report.failures() {
                        eprintln!(
                            "FAILED {} {} {} ({}): {} vs {}",
                            r.instance,
                            r.state,
                            r.check,
                            r.param,
                            r.lhs.to_f64(),
                            r.rhs.to_f64()
                        );
                    }
                    eprintln!("report written to {}", path.display());
                    Ok(Outcome::BackedFailure)
                } else {
                    Ok(Outcome::Clean)
                }
            }
            Command::Scaling(_) => commands::cmd_scaling(&ctx).map(|_| Outcome::Clean),
            Command::Continuum(_) => commands::cmd_continuum(&ctx).map(|_| Outcome::Clean),
        }
    };
    match common.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(job),
        None => job(),
    }
}

/// Exit status: 0 clean, 1 backed certification failure, 2 error.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli.command) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::BackedFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
