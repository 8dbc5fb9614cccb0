//! `wscavity`: figure and table data for Wannier-Stark cavity gravimetry.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
//! `WSCAVITY_MAX_THREADS` caps the worker count regardless of `--threads`.

mod commands;
mod config;
mod oracle_check;
mod output;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, RunConfig};
use output::{manifest_path, sha256_hex, write_atomic, Manifest, Table, UNIT_SYSTEM};

pub const THREADS_ENV: &str = "WSCAVITY_MAX_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

impl From<wscavity::Error> for CliError {
    fn from(e: wscavity::Error) -> Self {
        match e {
            wscavity::Error::Numeric { .. } => Self::Numeric(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wscavity", version, about = "Wannier-Stark cavity-QED gravimetry calculations")]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides the config document.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Data file; a `<out>.manifest.json` is written next to it. Standard
    /// output when omitted, with the manifest on standard error.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Coarser grids and fewer draws.
    #[arg(long, global = true)]
    quick: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lattice depths where the cavity couplings become homogeneous.
    MagicDepth,
    /// Δχ/χ against lattice depth.
    DeltaChi,
    /// Optimal echo squeezing for the configured atom number and cooperativity.
    Gain,
    /// Δg/g against atom number for the ideal, P_f = 1/2 and P_f = 0 cases.
    Sensitivity,
    /// Thermal spreads of tunneling, Stark shift and twisting strength.
    Thermal,
    /// Tight-binding, hopping and adiabatic-elimination diagnostics.
    Validity,
    /// Coherent against squeezed interrogation as a function of τ.
    Interrogation,
    /// Closed forms against brute-force simulators on random draws.
    OracleCheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::MagicDepth => "magic-depth",
            Self::DeltaChi => "delta-chi",
            Self::Gain => "gain",
            Self::Sensitivity => "sensitivity",
            Self::Thermal => "thermal",
            Self::Validity => "validity",
            Self::Interrogation => "interrogation",
            Self::OracleCheck => "oracle-check",
        }
    }
}

fn thread_count(requested: Option<usize>) -> Result<usize, CliError> {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut n = requested.unwrap_or(available);
    if let Ok(cap) = std::env::var(THREADS_ENV) {
        let cap: usize = cap
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer")))?;
        n = n.min(cap);
    }
    if n == 0 {
        return Err(CliError::Config("thread count must be positive".into()));
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = thread_count(cli.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
                other => other,
            })?
        }
        None => RunConfig::defaults(),
    };
    let format = cli.format.unwrap_or(cfg.format);
    let table: Table = match cli.command {
        Command::MagicDepth => commands::magic_depth(&cfg)?,
        Command::DeltaChi => commands::delta_chi_sweep(&cfg, cli.quick)?,
        Command::Gain => commands::gain(&cfg)?,
        Command::Sensitivity => commands::sensitivity(&cfg, cli.quick, threads)?,
        Command::Thermal => commands::thermal(&cfg, cli.quick)?,
        Command::Validity => commands::validity(&cfg)?,
        Command::Interrogation => commands::interrogation(&cfg, cli.quick)?,
        Command::OracleCheck => commands::oracle_check(&cfg, cli.quick)?,
    };
    let data = table.render(format, cli.command.name())?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        library_version: wscavity::VERSION,
        command: cli.command.name().to_string(),
        config_path: cli.config.as_ref().map(|p| p.display().to_string()),
        config_sha256: cfg.digest(),
        seed: cfg.seed,
        format,
        quick: cli.quick,
        unit_system: UNIT_SYSTEM,
        data_sha256: sha256_hex(data.as_bytes()),
        notes: table.notes.clone(),
    };
    match &cli.out {
        Some(path) => {
            write_atomic(path, &data)?;
            write_atomic(&manifest_path(path), &manifest.to_json())?;
        }
        None => {
            print!("{data}");
            eprint!("{}", manifest.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
