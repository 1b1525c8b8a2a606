//! `pipeline`: prepares the cohort, splits and balances it, runs the
//! statistical analyses, trains the configured models and evaluates them.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mortband::{Error, ErrorKind, Result};

use config::{Overrides, RunConfig};
use manifest::Run;

#[derive(Parser)]
#[command(name = "pipeline", version, about = "Three-band mortality classification pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deduplicate, fuse the target, bin, fill and decode the raw CSV.
    Prepare(Common),
    /// Stratified train/test split of the encoded table.
    Split(Common),
    /// Random under-sampling of the training set.
    Balance(Common),
    /// Chi-squared tests of the configured variables and pairs.
    Analyze(Common),
    /// Fit the configured models on the balanced training set.
    Train(Common),
    /// Score the trained models on the test set.
    Evaluate(Common),
    /// Per-class chi-squared association matrix of every input.
    FeatureAnalysis(Common),
    /// Every step in order.
    RunAll(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raw input CSV; overrides `input`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory; overrides `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed_split: Option<u64>,
    #[arg(long)]
    seed_balance: Option<u64>,
    #[arg(long)]
    seed_model: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => serde_json::from_str("{}").map_err(Error::from)?,
        };
        cfg.apply(&Overrides {
            input: self.input.clone(),
            out: self.out.clone(),
            seed_split: self.seed_split,
            seed_balance: self.seed_balance,
            seed_model: self.seed_model,
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let (common, step): (&Common, fn(&RunConfig, &mut Run) -> Result<()>) = match &cli.command {
        Command::Prepare(c) => (c, commands::prepare_cmd),
        Command::Split(c) => (c, commands::split_cmd),
        Command::Balance(c) => (c, commands::balance_cmd),
        Command::Analyze(c) => (c, commands::analyze_cmd),
        Command::Train(c) => (c, commands::train_cmd),
        Command::Evaluate(c) => (c, commands::evaluate_cmd),
        Command::FeatureAnalysis(c) => (c, commands::feature_analysis_cmd),
        Command::RunAll(c) => (c, commands::run_all),
    };
    let cfg = common.load()?;
    let mut run = Run::open(&cfg.out_dir())?;
    step(&cfg, &mut run)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numeric => 4,
            })
        }
    }
}
