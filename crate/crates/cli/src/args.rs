use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algo::Algo;
use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "uhrlab", version, about = "Breadth-first search versus restarting random walks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form runtimes, bounds and crossover curves.
    Analyze(AnalyzeArgs),
    /// Monte-Carlo trials of one algorithm on a synthetic task.
    Simulate(SimulateArgs),
    /// Runs a search algorithm on a STRIPS task with h_ff.
    Plan(PlanArgs),
    /// Checks a plan file against a STRIPS task.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Figure description: inline JSON or a path.
    #[arg(long)]
    pub spec: String,
    /// Master seed for optional Monte-Carlo columns.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Task description: inline JSON or a path.
    #[arg(long)]
    pub spec: String,
    /// brfs | crrw:L | luby:M | ehc:brfs | ehc:crrw:L | ehc:luby:M
    #[arg(long)]
    pub algo: Algo,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_generations: Option<u64>,
    #[arg(long)]
    pub max_walks: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Domain PDDL file (or give both files via --spec).
    pub domain: Option<PathBuf>,
    /// Problem PDDL file.
    pub problem: Option<PathBuf>,
    /// `{"domain": path, "problem": path}` inline or as a path.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long, default_value = "ehc:brfs")]
    pub algo: Algo,
    /// Number of runs; run i uses seed + i.
    #[arg(long, default_value_t = 5)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_generations: Option<u64>,
    #[arg(long)]
    pub max_walks: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub domain: PathBuf,
    pub problem: PathBuf,
    pub plan: PathBuf,
}
