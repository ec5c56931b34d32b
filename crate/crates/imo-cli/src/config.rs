//! Command-line flags, the optional JSON config file, and their merge.
//!
//! Precedence per field: flag, then config file, then `IMO_SEED` (seed
//! only), then the built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use imo::solver::{DirectionKind, SolverParams};
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_RUNS: usize = 100;
pub const DEFAULT_OUT_DIR: &str = "./imo-out";
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "imo",
    version,
    about = "Newton's method for multiobjective interval optimization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the solver on one problem and print the iterates.
    Solve(Common),
    /// Multi-start campaign with summary statistics.
    Bench(Common),
    /// Newton versus steepest descent performance profiles.
    Profile(Common),
    /// Weighted-sum cross-check on I-BK1.
    Verify(Common),
    /// Solve the two-asset portfolio problem from the reference starts.
    Portfolio(Common),
    /// Print the problem catalogue as JSON.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Newton,
    Steepest,
}

impl From<Direction> for DirectionKind {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Newton => DirectionKind::Newton,
            Direction::Steepest => DirectionKind::SteepestDescent,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem name (see `imo list`).
    #[arg(long)]
    pub problem: Option<String>,
    /// Comma-separated problem names for `bench` and `profile`.
    #[arg(long, value_delimiter = ',')]
    pub problems: Option<Vec<String>>,
    /// Start point as comma-separated reals.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Random seed [env: IMO_SEED] [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Direction subproblem for `solve` and `bench`.
    #[arg(long, value_enum)]
    pub direction: Option<Direction>,
    /// Runs per problem [default: 100].
    #[arg(long)]
    pub runs: Option<usize>,
    /// Worker threads [default: logical cores].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory, created if missing [default: ./imo-out].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Write only this format; all formats when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Tolerance for `verify` [default: 1e-3].
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// The config file mirrors the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: Option<String>,
    pub problems: Option<Vec<String>>,
    pub x0: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub eta: Option<f64>,
    pub sigma: Option<f64>,
    pub eps: Option<f64>,
    pub max_iters: Option<usize>,
    pub direction: Option<Direction>,
    pub runs: Option<usize>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerance: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub problem: Option<String>,
    pub problems: Option<Vec<String>>,
    pub x0: Option<Vec<f64>>,
    pub seed: u64,
    pub params: SolverParams,
    pub runs: usize,
    pub jobs: Option<usize>,
    pub out_dir: PathBuf,
    pub format: Option<Format>,
    pub tolerance: f64,
}

impl Config {
    pub fn resolve(flags: Common, env_seed: Option<String>) -> Result<Self, String> {
        let file = match &flags.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let env_seed = match env_seed {
            Some(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|e| format!("IMO_SEED={s}: {e}"))?,
            ),
            None => None,
        };
        let base = SolverParams::default();
        let eta = flags.eta.or(file.eta).unwrap_or(base.eta);
        let mut params = SolverParams::new(
            eta,
            flags.sigma.or(file.sigma).unwrap_or(base.sigma),
            flags.eps.or(file.eps).unwrap_or(base.eps),
            flags.max_iters.or(file.max_iters).unwrap_or(base.max_iters),
        );
        if let Some(d) = flags.direction.or(file.direction) {
            params = params.with_direction(d.into());
        }
        params.validate().map_err(|e| e.to_string())?;
        let runs = flags.runs.or(file.runs).unwrap_or(DEFAULT_RUNS);
        if runs == 0 {
            return Err("--runs must be at least 1".into());
        }
        let jobs = flags.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err("--jobs must be at least 1".into());
        }
        Ok(Config {
            problem: flags.problem.or(file.problem),
            problems: flags.problems.or(file.problems),
            x0: flags.x0.or(file.x0),
            seed: flags
                .seed
                .or(file.seed)
                .or(env_seed)
                .unwrap_or(DEFAULT_SEED),
            params,
            runs,
            jobs,
            out_dir: flags
                .out_dir
                .or(file.out_dir)
                .unwrap_or_else(|| DEFAULT_OUT_DIR.into()),
            format: flags.format.or(file.format),
            tolerance: flags
                .tolerance
                .or(file.tolerance)
                .unwrap_or(DEFAULT_TOLERANCE),
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.format.is_none_or(|g| g == f)
    }
}
