//! Command-line surface: flag parsing, config merging, bundle persistence
//! and exit codes.

mod bundle;
mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use bundle::{Cell, Column, ColumnKind, Provenance, ReportBundle, Table, SCHEMA_VERSION};
pub use commands::{
    cmd_diagnostics, cmd_estimate, cmd_limit_model, cmd_report, cmd_simulate, CommandOutput, Functional, DEFAULT_GRID,
    DIAGNOSTICS, DIAGNOSTIC_GRID,
};
pub use config::RunConfig;

use crate::Error;

/// Exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// I/O failures not attributable to the configuration.
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const DEGENERACY: i32 = 3;
    pub const TRUNCATION: i32 = 4;
}

/// Maps an error onto the documented exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::MissingBeta { .. }
        | Error::OutOfRange(_)
        | Error::DimensionMismatch { .. }
        | Error::LambdaTooSmall { .. }
        | Error::InstanceTooLarge { .. } => exit::CONFIG,
        Error::DegeneracyBudget { .. }
        | Error::DegenerateInput { .. }
        | Error::TooFewPoints { .. }
        | Error::OriginOnFacetHull
        | Error::OriginNotInterior
        | Error::OutsideDomain(_) => exit::DEGENERACY,
        Error::TruncationDominates { .. } => exit::TRUNCATION,
        Error::Io(_) => exit::FAILURE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "gauss-festoon", version, about = "Gaussian polytopes and their parabolic festoon limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample Gaussian polytopes and persist per-replicate f-vectors, volumes and scores.
    Simulate(Flags),
    /// Sample the limit model: extreme-point counts, festoon faces, shocks.
    LimitModel(Flags),
    /// Estimate the variance constants along the selected routes.
    Estimate(Flags),
    /// Diagnostic scans (paralem, h-tail, r-tail, intensity).
    Diagnostics(Flags),
    /// Re-read, validate and summarise (or re-render) a bundle.
    Report(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::LimitModel(_) => "limit-model",
            Command::Estimate(_) => "estimate",
            Command::Diagnostics(_) => "diagnostics",
            Command::Report(_) => "report",
        }
    }

    fn flags(&self) -> &Flags {
        match self {
            Command::Simulate(f) | Command::LimitModel(f) | Command::Estimate(f) | Command::Diagnostics(f) | Command::Report(f) => f,
        }
    }
}

/// Flags shared by every command; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Binomial sample size.
    #[arg(long)]
    pub n: Option<f64>,
    /// Poisson intensity.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated size grid.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed (required by every sampling command).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores); never changes results.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long = "window-l")]
    pub window_l: Option<f64>,
    #[arg(long)]
    pub hmax: Option<f64>,
    /// direct | limit-integral | window | all
    #[arg(long)]
    pub route: Option<String>,
    /// kface | defect_volume | intrinsic
    #[arg(long)]
    pub functional: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Output directory for the bundle.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated diagnostics.
    #[arg(long, value_delimiter = ',')]
    pub diagnostics: Option<Vec<String>>,
    /// Run the h_max + 2 truncation audit (limit-model).
    #[arg(long)]
    pub sensitivity: bool,
    /// Existing bundle directory (report).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

impl Flags {
    fn as_config(&self) -> RunConfig {
        RunConfig {
            dim: self.dim,
            n: self.n,
            lambda: self.lambda,
            grid: self.grid.clone(),
            reps: self.reps,
            seed: self.seed,
            workers: self.workers,
            window_l: self.window_l,
            hmax: self.hmax,
            route: self.route.clone(),
            functional: self.functional.clone(),
            k: self.k,
            out: self.out.clone(),
            diagnostics: self.diagnostics.clone(),
            sensitivity: self.sensitivity.then_some(true),
            degeneracy_budget: None,
            input: self.input.clone(),
        }
    }
}

/// Effective config: file values overridden by flags.
pub fn resolve_config(flags: &Flags) -> crate::Result<RunConfig> {
    let base = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    Ok(base.overridden_by(flags.as_config()))
}

/// Runs a parsed command line, printing to stdout/stderr, and returns the
/// process exit code.
pub fn run(cli: Cli) -> i32 {
    let cfg = match resolve_config(cli.command.flags()) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let outcome = match &cli.command {
        Command::Simulate(_) => cmd_simulate(&cfg),
        Command::LimitModel(_) => cmd_limit_model(&cfg),
        Command::Estimate(_) => cmd_estimate(&cfg),
        Command::Diagnostics(_) => cmd_diagnostics(&cfg),
        Command::Report(_) => {
            return match cmd_report(&cfg) {
                Ok((bundle, summary)) => {
                    print!("{summary}");
                    if let Some(out) = &cfg.out {
                        if let Err(e) = bundle.write(out) {
                            return fail(&e);
                        }
                    }
                    exit::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    };
    let out = match outcome {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}-out", cli.command.name())));
    if let Err(e) = out.bundle.write(&dir) {
        return fail(&e);
    }
    println!("wrote {} table(s) to {}", out.bundle.tables.len(), dir.display());
    for n in &out.bundle.notes {
        println!("note: {n}");
    }
    if let Some(c) = &out.bundle.constants {
        for e in &c.entries {
            println!("{} [{}] = {:.6} ± {:.6}", e.constant, e.route, e.estimate.value, e.estimate.std_error);
        }
        for v in c.overlaps() {
            println!("{}: {} vs {} overlap = {}", v.constant, v.first, v.second, v.overlap);
        }
    }
    match out.status {
        Ok(()) => exit::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}
