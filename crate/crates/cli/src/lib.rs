//! Command-line front end for `popgame`.
//!
//! Every subcommand reads a [`RunConfig`], writes its result files plus a
//! `manifest.json` into the output directory, and maps failures onto a fixed
//! set of exit codes (see [`CliError::exit_code`]).

pub mod commands;
pub mod config;
pub mod output;
pub mod sweep;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("regime ambiguity: {0}")]
    Ambiguity(String),
    #[error("not converged: {0}")]
    NonConvergence(String),
    #[error("i/o error on {0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error(transparent)]
    Model(popgame::Error),
}

impl CliError {
    /// 0 ok, 2 config, 3 regime ambiguity, 4 non-convergence, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Ambiguity(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Io(..) | CliError::Model(_) => 1,
        }
    }
}

impl From<popgame::Error> for CliError {
    fn from(e: popgame::Error) -> Self {
        use popgame::Error as E;
        match e {
            E::RegimeAmbiguity { boundary } => CliError::Ambiguity(boundary),
            E::Domain { .. }
            | E::InvalidParams(_)
            | E::InvalidMix(_)
            | E::InvalidConfig(_)
            | E::InvalidModel(_)
            | E::StepSize { .. } => CliError::Config(e.to_string()),
            E::Divergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Model(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "popgame",
    version,
    about = "Clean-technology population game solver and simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML, or JSON when the name ends in .json).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format; overrides `output.format`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Master seed; overrides `sim.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exit with code 4 when a run fails its convergence or verification check.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Sweep on inclusive grids instead of cell midpoints.
    #[arg(long, global = true)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// All equilibria with stability flags.
    Equilibria,
    /// Stable equilibria only.
    StableSet,
    /// One turn-by-turn trajectory.
    Simulate,
    /// Many turn-by-turn runs matched against the stable set.
    MonteCarlo,
    /// Replicator trajectory and phase line.
    Replicator,
    /// CO2 trajectory and environmental cost table.
    EnvIntegrate,
    /// Check that the environmental penalty leaves the game unchanged.
    EnvVerify,
    /// Stable sets over a one- or two-parameter grid.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Equilibria => "equilibria",
            Command::StableSet => "stable-set",
            Command::Simulate => "simulate",
            Command::MonteCarlo => "monte-carlo",
            Command::Replicator => "replicator",
            Command::EnvIntegrate => "env-integrate",
            Command::EnvVerify => "env-verify",
            Command::Sweep => "sweep",
        }
    }
}

/// Loads the config, applies command-line overrides and runs the command.
/// Returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(seed) = cli.seed {
        if let Some(sim) = cfg.sim.as_mut() {
            sim.seed = seed;
        }
    }
    if cli.exact {
        if let Some(sweep) = cfg.sweep.as_mut() {
            sweep.exact = true;
        }
    }
    cfg.validate()?;
    commands::dispatch(cli.command, &cfg, cli.strict)
}
