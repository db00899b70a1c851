//! `qmix` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 numerical failure.

mod config;
mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{Overrides, Resolved};
use crate::tasks::Session;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<qmix::Error> for CliError {
    fn from(e: qmix::Error) -> Self {
        use qmix::Error::*;
        match e {
            InvalidLayout(_) | QubitIndexOutOfRange { .. } | PhotonOutOfRange { .. } | LevelCountMismatch { .. }
            | DimensionMismatch { .. } | InvalidConfig(_) | UnknownParameter(_) | ResonantQubit { .. }
            | NonMonotoneGrid | UnsupportedOrder(_) | InvalidGate(_) | AncillaNotReset(_) | InvalidLogicalState(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qmix", version, about = "Multi-qubit mixing in ultrastrongly coupled qubit-cavity systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for parameter scans.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Fock-space cutoff override.
    #[arg(long, global = true, value_name = "N")]
    cutoff: Option<usize>,

    /// Seed for random logical states.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct Target {
    /// Configuration file (alternative to --config).
    path: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy levels along the configured sweep.
    Levels(Target),
    /// Locate the configured avoided crossing.
    Anticross(Target),
    /// Perturbative path sum between two bare states.
    Perturb(Target),
    /// Dressed master-equation dynamics.
    Dynamics(Target),
    /// Error-correction suite.
    Ecc(Target),
    /// Check a configuration without running it.
    Validate(Target),
    /// Everything the scenario defines.
    Run(Target),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Levels(_) => "levels",
            Command::Anticross(_) => "anticross",
            Command::Perturb(_) => "perturb",
            Command::Dynamics(_) => "dynamics",
            Command::Ecc(_) => "ecc",
            Command::Validate(_) => "validate",
            Command::Run(_) => "run",
        }
    }

    fn target(&self) -> &Target {
        match self {
            Command::Levels(t)
            | Command::Anticross(t)
            | Command::Perturb(t)
            | Command::Dynamics(t)
            | Command::Ecc(t)
            | Command::Validate(t)
            | Command::Run(t) => t,
        }
    }
}

fn load(cli: &Cli) -> Result<(config::RunConfig, Resolved), CliError> {
    let path = match (&cli.config, &cli.command.target().path) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Validation(format!("two config files given: {} and {}", a.display(), b.display())))
        }
        (Some(p), _) | (None, Some(p)) => p.clone(),
        (None, None) => return Err(CliError::Validation("no configuration given; pass --config PATH".into())),
    };
    if cli.cutoff == Some(0) {
        return Err(CliError::Validation("--cutoff must be at least 1".into()));
    }
    let raw = config::load(&path)?;
    let resolved = config::resolve(&raw, Overrides { cutoff: cli.cutoff, seed: cli.seed })?;
    Ok((raw, resolved))
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    let (_, resolved) = load(cli)?;
    for w in config::warnings(&resolved) {
        println!("warning: {w}");
    }
    println!("ok: scenario {:?} is valid", resolved.scenario);
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        if !qmix::parallel::init_threads(n) {
            log::warn!("thread pool already initialised or parallel feature disabled; --threads ignored");
        }
    }
    if matches!(cli.command, Command::Validate(_)) {
        return validate(cli);
    }
    let (raw, resolved) = load(cli)?;
    for w in config::warnings(&resolved) {
        log::warn!("{w}");
    }
    let out = cli.out.clone().or(raw.out).unwrap_or_else(|| PathBuf::from("qmix-out"));
    let start = Instant::now();
    let mut session = Session::default();
    match &cli.command {
        Command::Levels(_) => session.levels(&resolved)?,
        Command::Anticross(_) => session.anticross(&resolved)?,
        Command::Perturb(_) => session.perturb(&resolved)?,
        Command::Dynamics(_) => session.dynamics(&resolved)?,
        Command::Ecc(_) => session.ecc(&resolved)?,
        Command::Run(_) => session.run_all(&resolved)?,
        Command::Validate(_) => unreachable!(),
    }
    let manifest = output::write(&out, cli.command.name(), &resolved, &session.artifacts, start.elapsed().as_secs_f64())?;
    println!("{}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmix: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
