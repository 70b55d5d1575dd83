//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Outcome};
use crate::config::{parse_params, RunConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "peakctl", version, about = "Peak minimization under an L1 control budget")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the singular level and sample the budget curve
    Synthesize {
        #[command(flatten)]
        common: Common,
    },
    /// Simulate the NSN closed loop (or u = 0 with --uncontrolled)
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Run with the control switched off
        #[arg(long)]
        uncontrolled: bool,
    },
    /// Check the sufficient conditions on a grid
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the NSN peak with random piecewise-constant controls
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Repeat the NSN run over budget or parameter values
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `budget` or a model parameter name
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    /// Model parameters as key=value, repeatable or comma-separated
    #[arg(long, num_args = 1..)]
    pub params: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    /// Control budget K
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Grid nodes per axis for checks
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub pieces: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for output files
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn to_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(m) = &self.model {
            if *m != cfg.model {
                cfg.params.clear();
                cfg.x0 = None;
                cfg.y0 = None;
            }
            cfg.model = m.clone();
        }
        cfg.params.extend(parse_params(&self.params)?);
        if self.x0.is_some() {
            cfg.x0 = self.x0;
        }
        if self.y0.is_some() {
            cfg.y0 = self.y0;
        }
        if let Some(v) = self.budget {
            cfg.budget = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.grid {
            cfg.grid.n = v;
        }
        if let Some(v) = self.samples {
            cfg.oracle.samples = v;
        }
        if let Some(v) = self.pieces {
            cfg.oracle.pieces = v;
        }
        if let Some(v) = self.seed {
            cfg.oracle.seed = v;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.resolve()
    }
}

fn write_artifacts(cfg: &RunConfig, outcome: &Outcome) -> Result<(), CliError> {
    let Some(dir) = &cfg.out else {
        return Ok(());
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    for a in &outcome.artifacts {
        let path = dir.join(a.file_name);
        std::fs::write(&path, &a.contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Runs a parsed command line, printing the primary artifact. Returns the
/// process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let (cfg, outcome) = match cli.command {
        Command::Synthesize { common } => {
            let cfg = common.to_config()?;
            let (_, o) = commands::synthesize(&cfg)?;
            (cfg, o)
        }
        Command::Simulate { common, uncontrolled } => {
            let mut cfg = common.to_config()?;
            cfg.uncontrolled |= uncontrolled;
            let (_, o) = commands::simulate(&cfg)?;
            (cfg, o)
        }
        Command::Check { common } => {
            let cfg = common.to_config()?;
            let (_, o) = commands::check(&cfg)?;
            (cfg, o)
        }
        Command::Oracle { common } => {
            let cfg = common.to_config()?;
            let (_, o) = commands::oracle(&cfg)?;
            (cfg, o)
        }
        Command::Sweep { common, axis, values } => {
            let cfg = common.to_config()?;
            let (_, o) = commands::sweep(&cfg, &axis, &values)?;
            (cfg, o)
        }
    };
    write_artifacts(&cfg, &outcome)?;
    print!("{}", outcome.stdout);
    Ok(outcome.exit_code)
}
