//! Command-line front end: configuration handling, presets, the six
//! commands and their file outputs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{RunConfig, SystemConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("tolerance breach: {0}")]
    Tolerance(String),
    #[error("{0}")]
    Core(biphoton::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(e: biphoton::Error) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Tolerance(_) | CliError::Core(biphoton::Error::ProtocolMismatch { .. }) => 1,
            _ => 2,
        }
    }
}

impl From<biphoton::Error> for CliError {
    fn from(e: biphoton::Error) -> Self {
        match e {
            biphoton::Error::ProtocolMismatch { .. } => CliError::Core(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Protocols {
    Default,
    PaperVerbatim,
}

#[derive(Debug, Parser)]
#[command(name = "biphoton", version, about = "Entangled-photon-pair interferometric spectroscopy simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML, or a sidecar of an earlier output).
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in configuration.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Cycling protocol set.
    #[arg(long, global = true, value_enum)]
    pub protocols: Option<Protocols>,
    /// Exciton system file; replaces the configured system.
    #[arg(long, global = true)]
    pub system: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// JSA grids for the configured exchange phases plus a Schmidt report.
    Jsa,
    /// Schmidt weights, Schmidt numbers and leading mode functions.
    Schmidt,
    /// Total coincidence over (pump frequency, delay), its delay trace,
    /// dephasing spectrum and envelope fit.
    Dephasing,
    /// Frequency-resolved coincidence map and the four cycling panels.
    Spectra2d,
    /// Cycling protocols validated against direct pathway evaluation.
    Cycle,
    /// Fast pathways against the time-domain oracle.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Jsa => "jsa",
            Command::Schmidt => "schmidt",
            Command::Dephasing => "dephasing",
            Command::Spectra2d => "spectra2d",
            Command::Cycle => "cycle",
            Command::Verify => "verify",
        }
    }
}

/// Everything a command needs after flags and files are merged.
pub struct Resolved {
    pub command: Command,
    pub config: RunConfig,
    pub preset: Option<String>,
    pub out: PathBuf,
    pub workers: usize,
}

pub fn resolve(cli: &Cli) -> Result<Resolved, CliError> {
    let (mut config, base) = match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            (RunConfig::from_toml(&text)?, path.parent().map(Path::to_path_buf))
        }
        (None, Some(name)) => (presets::load(name)?, None),
        (None, None) => return Err(CliError::Config("give --config <path> or --preset <name>".into())),
    };
    if let Some(p) = &cli.system {
        config.system = Some(SystemConfig { builtin: None, path: None, spec: Some(config::load_system(p)?) });
    } else if let Some(s) = &config.system {
        config.system = Some(SystemConfig { builtin: None, path: None, spec: Some(s.resolve(base.as_deref())?) });
    }
    match cli.protocols {
        Some(Protocols::Default) => config.protocols = Some("default".into()),
        Some(Protocols::PaperVerbatim) => config.protocols = Some("paper-verbatim".into()),
        None => {}
    }
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    Ok(Resolved { command: cli.command, config, preset: cli.preset.clone(), out: cli.out.clone(), workers })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match resolve(&cli).and_then(|r| biphoton::par::with_workers(r.workers, || commands::execute(&r))) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
