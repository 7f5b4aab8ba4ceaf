//! Command-line front end of the `hcl` binary.

mod commands;
pub mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use commands::{default_lemma_battery, execute, Outcome};
pub use config::{DomainConfig, FieldSource, ProblemConfig, RunOptions, SConfig};
pub use output::SCHEMA_LINE;

pub const DEFAULT_SEED: u64 = 20_240_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Bordered-matrix eigenvalue localization battery.
    LemmaCheck,
    /// Structure battery and Γ_G classification.
    ConeCheck,
    /// ε-dichotomy contexts and C-subsolution checks.
    SubsolCheck,
    /// Closed-mode solve on a torus.
    SolveClosed,
    /// Dirichlet solve on a product domain.
    SolveDirichlet,
    /// Regularized solves along an ε-ladder plus stability pairs.
    DegenerateSweep,
    /// Solves on an exhausting family of sub-domains.
    Exhaustion,
    /// Estimate quantities over a ψ-amplitude sweep.
    EstimateReport,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LemmaCheck => "lemma-check",
            Command::ConeCheck => "cone-check",
            Command::SubsolCheck => "subsol-check",
            Command::SolveClosed => "solve-closed",
            Command::SolveDirichlet => "solve-dirichlet",
            Command::DegenerateSweep => "degenerate-sweep",
            Command::Exhaustion => "exhaustion",
            Command::EstimateReport => "estimate-report",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hcl", version, about = "Complex Hessian equation laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "hcl-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    /// Overrides `options.seed` of the configuration.
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self { command: c.command, config: c.config, out: c.out, seed: c.seed, quiet: c.quiet }
    }
}

/// Runs a command and maps the result to a process exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(outcome) => {
            if !cfg.quiet {
                for p in &outcome.files {
                    eprintln!("wrote {}", p.display());
                }
            }
            if outcome.findings > 0 {
                eprintln!("hcl {}: {} finding(s)", cfg.command.name(), outcome.findings);
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("hcl {}: {e}", cfg.command.name());
            e.exit_code()
        }
    }
}
