//! `competing-types` command line.
//!
//! Every setting a flag controls can also be given in the config file. When
//! both are present the flag wins; defaults apply only when neither is set.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use competing_types::Error;
use config::{Config, Format, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed")]
    Verification,
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Core(Error),
}

impl CliError {
    /// Parameter errors are config errors; everything else is a run failure.
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::InvalidTypeAssignment(_)
            | Error::InvalidFitness(_)
            | Error::InvalidInitialGraph(_)
            | Error::InvalidArgument(_)
            | Error::NotApplicable(_)
            | Error::WrongModel(_) => CliError::Config(e.to_string()),
            e => CliError::Core(e),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verification => 3,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }

    fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(Error::UnresolvedRoot { .. }) => {
                Some("hint: raise \"search\": {\"grid_n\": ...} in the config, e.g. to 65536")
            }
            _ => None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "competing-types", version, about = "Two-type preferential attachment with fitness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config (or a manifest.json from an earlier run).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides "seed" in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides "out" in the config. Default: ./out
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ensembles; overrides "threads" in the config.
    #[arg(long)]
    threads: Option<usize>,
    /// Tabular output format; overrides "format" in the config.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zeros, stability and thresholds of the competition function.
    Analyze(Common),
    /// One trajectory.
    Simulate(Common),
    /// Many runs classified by domination.
    Ensemble(Common),
    /// Zero structure across a parameter grid.
    Scan(Common),
    /// Built-in consistency checks; exit 3 on failure.
    Verify(Common),
}

fn load(common: &Common) -> Result<Option<Config>, CliError> {
    let Some(path) = &common.config else {
        return Ok(None);
    };
    let mut cfg = Config::load(path)?;
    cfg.apply(&Overrides {
        seed: common.seed,
        out: common.out.clone(),
        threads: common.threads,
        format: common.format,
    });
    Ok(Some(cfg))
}

fn set_threads(n: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (common, name) = match &cli.command {
        Command::Analyze(c) => (c, "analyze"),
        Command::Simulate(c) => (c, "simulate"),
        Command::Ensemble(c) => (c, "ensemble"),
        Command::Scan(c) => (c, "scan"),
        Command::Verify(c) => (c, "verify"),
    };
    let cfg = load(common)?;
    set_threads(cfg.as_ref().and_then(|c| c.threads).or(common.threads))?;
    if let Command::Verify(_) = cli.command {
        let format = common.format.or(cfg.as_ref().and_then(|c| c.format)).unwrap_or_default();
        let seed = common.seed.or(cfg.as_ref().and_then(|c| c.seed)).unwrap_or(config::DEFAULT_SEED);
        return commands::verify_cmd(cfg.as_ref(), &common.out, format, seed);
    }
    let cfg = cfg.ok_or_else(|| CliError::Config(format!("{name} needs --config PATH")))?;
    match cli.command {
        Command::Analyze(_) => commands::analyze_cmd(&cfg),
        Command::Simulate(_) => commands::simulate_cmd(&cfg),
        Command::Ensemble(_) => commands::ensemble_cmd(&cfg),
        Command::Scan(_) => commands::scan_cmd(&cfg),
        Command::Verify(_) => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("{h}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
