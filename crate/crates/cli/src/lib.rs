//! Command-line front end for `dressed-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use dressed_core::CavityVariant;

use crate::config::{RunConfig, DEFAULT_CONFIG};
use crate::error::CliError;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "DRESSED_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dressed", version, about = "Dressed-state spectra, decay amplitudes and cavity bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Normal-mode frequencies and particle weights.
    Spectrum,
    /// Survival amplitude and probability of the excited dressed level.
    Decay,
    /// Classical path of a coherently prepared dressed oscillator.
    Brownian,
    /// Survival inside a small cavity with analytic bounds.
    Cavity,
    /// Cross-check every route against the oracles.
    Validate,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// key=value configuration file (a built-in default is used otherwise).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout otherwise).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub route: Option<Route>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<Method>,
    #[arg(long, global = true, value_enum, default_value_t = Regime::Weak)]
    pub regime: Regime,
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub n_bar: f64,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long = "eq11-variant", global = true, value_enum, default_value_t = Variant::Rederived)]
    pub cavity_variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    FiniteN,
    Cavity,
    SmallL,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::FiniteN => "finite-n",
            Route::Cavity => "cavity",
            Route::SmallL => "small-l",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Discrete,
    Closed,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Discrete => "discrete",
            Method::Closed => "closed",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    Weak,
    Strong,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Paper,
    Rederived,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        CavityVariant::from(self).as_str()
    }
}

impl From<Variant> for CavityVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Paper => CavityVariant::Published,
            Variant::Rederived => CavityVariant::Rederived,
        }
    }
}

fn load_config(opts: &Options) -> Result<RunConfig, CliError> {
    let text = match &opts.config {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?
        }
        None => DEFAULT_CONFIG.to_string(),
    };
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(k) = opts.k_max {
        cfg.k_max = k;
    }
    if let Some(t) = opts.t_max {
        cfg.t_max = t;
    }
    if let Some(s) = opts.samples {
        cfg.samples = s;
    }
    cfg.check_grid()?;
    Ok(cfg)
}

fn emit(opts: &Options, text: &str) -> Result<(), CliError> {
    match &opts.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Run one parsed command.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.opts)?;
    let opts = &cli.opts;
    let curve = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, opts)?,
        Command::Decay => commands::decay(&cfg, opts)?,
        Command::Brownian => commands::brownian(&cfg, opts)?,
        Command::Cavity => commands::cavity(&cfg, opts)?,
        Command::Validate => {
            let (text, failed) = commands::validate(&cfg);
            emit(opts, &text)?;
            return if failed == 0 { Ok(()) } else { Err(CliError::Validation(failed)) };
        }
    };
    emit(opts, &curve.render())
}

/// Size the global rayon pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot size thread pool: {e}")))
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match configure_threads().and_then(|()| execute(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
