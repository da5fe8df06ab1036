//! Command-line front end for `uavcov`: parameter sweeps, deployment
//! optimization and the cross-method validation suite, all emitting CSV.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod optimize;
mod output;
mod sweep;
mod validate;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Axis, RunConfig, ScenarioArgs, Target};

pub use optimize::cmd_optimize;
pub use sweep::cmd_sweep;
pub use validate::cmd_validate;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Process exit status of a completed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ValidationFailed,
    PartialFailure,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ValidationFailed => 1,
            Outcome::PartialFailure => 3,
        }
    }
}

/// Exit code for configuration and I/O errors.
pub const EXIT_BAD_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "uavcov",
    version,
    about = "Coverage probability of UAV base-station networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage along one swept parameter, one column pair per method
    Sweep(SweepArgs),
    /// Altitude or density maximizing coverage
    Optimize(OptimizeArgs),
    /// Cross-check the analytic formulas against each other and against simulation
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Repeatable or comma separated: exact-quadrature, closed-n4, no-noise, noise-limited,
    /// density-approx, monte-carlo, nakagami-semianalytic
    #[arg(long = "method", value_delimiter = ',')]
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvaluatorArg {
    Analytic,
    NoiseLimited,
    MonteCarlo,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    pub target: Option<Target>,
    /// Lower bound: meters for height, km⁻² for density
    #[arg(long)]
    pub min: Option<f64>,
    /// Upper bound: meters for height, km⁻² for density
    #[arg(long)]
    pub max: Option<f64>,
    /// Coverage evaluator for the height search
    #[arg(long, value_enum, default_value = "analytic")]
    pub evaluator: EvaluatorArg,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Multiply ρ by this factor in the quadrature paths (fault injection)
    #[arg(long, hide = true)]
    pub perturb_rho: Option<f64>,
}

impl SweepArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = self.scenario.resolve()?;
        if self.axis.is_some() {
            c.axis = self.axis;
        }
        for (slot, v) in [(&mut c.from, self.from), (&mut c.to, self.to), (&mut c.step, self.step)] {
            if v.is_some() {
                *slot = v;
            }
        }
        if !self.methods.is_empty() {
            c.methods = self.methods.clone();
        }
        Ok(c)
    }
}

impl OptimizeArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = self.scenario.resolve()?;
        if self.target.is_some() {
            c.target = self.target;
        }
        if self.min.is_some() {
            c.min = self.min;
        }
        if self.max.is_some() {
            c.max = self.max;
        }
        Ok(c)
    }
}

/// Runs a parsed command and returns the process exit code; errors are reported on `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Sweep(a) => a.resolve().and_then(|c| cmd_sweep(&c, stdout, stderr)),
        Command::Optimize(a) => a.resolve().and_then(|c| cmd_optimize(&c, a.evaluator, stdout, stderr)),
        Command::Validate(a) => a
            .scenario
            .resolve()
            .and_then(|c| cmd_validate(&c, a.perturb_rho.unwrap_or(1.0), stdout)),
    };
    match result {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                CliError::Numeric(_) => Outcome::PartialFailure.code(),
                _ => EXIT_BAD_CONFIG,
            }
        }
    }
}
