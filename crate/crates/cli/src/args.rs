use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "erasim", version, about = "Simulate and analyze loss-aware fault-tolerance experiments on neutral atoms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for trial sampling (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an experiment and write records, summary and plot data.
    Run(RunArgs),
    /// Re-run estimators on stored records under other selection policies.
    Analyze(AnalyzeArgs),
    /// Run the fast property suite.
    Verify(VerifyArgs),
    /// List experiments, noise presets and codes.
    List,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment name (cat, cat-encoded, cat-encoded-24, bv, repeated-cz,
    /// random-sequence, tesseract, rb) or a full spec like `bv:n=7,encoded=true`.
    pub experiment: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub id: Option<usize>,
    /// BV hidden string, e.g. 1011.
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub encoded: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub ft: Option<bool>,
    /// RB kind: clifford-1q, irb-2q-static or echoed-2q.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub moves: Option<bool>,
    /// RB depths separated by `/`, e.g. 1/10/20.
    #[arg(long)]
    pub depths: Option<String>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Noise preset: paper, zero or static.
    #[arg(long)]
    pub noise: Option<String>,
    /// File of `key = value` lines applied on top of the preset.
    #[arg(long, value_name = "FILE")]
    pub noise_config: Option<PathBuf>,
    /// Override one rate, e.g. `--set p_1q=0.001`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Keep every trial (no preselection, no acceptance rule).
    #[arg(long)]
    pub no_selection: bool,
    /// Keep only trials without any loss.
    #[arg(long)]
    pub no_loss: bool,
    /// Loss threshold: a number, an inclusive range `A..B`, or `any`.
    /// Repeatable.
    #[arg(long, value_name = "K|A..B|any")]
    pub max_losses: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Trials per measurement setting [default: 1000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed [default: ERASIM_SEED, else 1].
    #[arg(long, env = "ERASIM_SEED")]
    pub seed: Option<u64>,
    /// Output directory [default: erasim-out].
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Replay a saved `run.json`; other experiment and noise flags are
    /// then not allowed.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Record files (JSON Lines) of one experiment.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Seed for random pairing steps [default: the records' seed].
    #[arg(long, env = "ERASIM_SEED")]
    pub seed: Option<u64>,
    /// Write the table here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check this code registry file instead of the built-in one.
    #[arg(long, value_name = "FILE")]
    pub codes: Option<PathBuf>,
    #[arg(long, env = "ERASIM_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Random circuits compared against the exact oracle.
    #[arg(long, default_value_t = 200)]
    pub oracle_circuits: u64,
}
