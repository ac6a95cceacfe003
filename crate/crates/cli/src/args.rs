use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use crisk::lime::Scenario;
use crisk::linear_models::Link;

#[derive(Debug, Parser)]
#[command(
    name = "crisk",
    version,
    about = "Credit-risk scoring pipeline: PD models, gradient boosting, Gini evaluation and LIME explanations"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// JSON file with configuration overrides (flags take precedence).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic credit portfolio with a known PD surface.
    Generate(GenerateArgs),
    /// Stratified train/test split of a CSV dataset.
    Split(SplitArgs),
    /// Fit a model and save it as a JSON document.
    #[command(subcommand)]
    Train(TrainCommand),
    /// Gini, AUC and Lorenz curve of one or two models on a dataset.
    Evaluate(EvaluateArgs),
    /// LIME explanation of one row.
    Explain(ExplainArgs),
    /// Repeat an explanation and measure how much it moves.
    Stability(StabilityArgs),
    /// Stress LIME along dimensionality, correlation or kernel width.
    Probe(ProbeArgs),
    /// Render an evaluation report or an explanation as SVG.
    Plot(PlotArgs),
    /// Replay a run from its manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Args)]
pub struct TargetArg {
    /// Name of the 0/1 default column.
    #[arg(long, default_value = "default")]
    pub target: String,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("shape").args(["linear", "nonlinear"])))]
pub struct GenerateArgs {
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub features: Option<usize>,
    #[arg(long)]
    pub bad_rate: Option<f64>,
    /// Common pairwise correlation of the features.
    #[arg(long)]
    pub correlation: Option<f64>,
    /// Linear-logit ground truth (the default).
    #[arg(long)]
    pub linear: bool,
    /// Ground truth with an interaction and a step term.
    #[arg(long)]
    pub nonlinear: bool,
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long, default_value = "data.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Largest allowed bad-rate difference between the two sides.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value = "train.csv")]
    pub train_output: PathBuf,
    #[arg(long, default_value = "test.csv")]
    pub test_output: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum TrainCommand {
    /// Linear, logistic or probit PD model.
    Glm(TrainGlmArgs),
    /// Gradient boosted trees.
    Gbm(TrainGbmArgs),
}

#[derive(Debug, Args)]
pub struct TrainGlmArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub target: TargetArg,
    /// identity, logit or probit.
    #[arg(long)]
    pub link: Option<Link>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value = "glm.model")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainGbmArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub min_samples_leaf: Option<usize>,
    #[arg(long)]
    pub subsample: Option<f64>,
    #[arg(long, default_value = "gbm.model")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model_a: PathBuf,
    #[arg(long)]
    pub model_b: Option<PathBuf>,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long, default_value = "report.json")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct LimeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset holding the unit to explain.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub target: TargetArg,
    /// Zero-based row of `--data` to explain.
    #[arg(long)]
    pub row: usize,
    /// Dataset whose per-feature statistics scale the neighborhood
    /// (defaults to `--data`).
    #[arg(long)]
    pub stats_data: Option<PathBuf>,
    /// Number of features shown.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub kernel_width: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Quartile-bin perturbation instead of continuous noise.
    #[arg(long)]
    pub binned: bool,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub lime: LimeArgs,
    #[arg(long, default_value = "explanation.json")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub lime: LimeArgs,
    #[arg(long, default_value_t = 3)]
    pub runs: usize,
    /// Reuse the same seed for every run instead of seed, seed+1, …
    #[arg(long)]
    pub fixed_seed: bool,
    #[arg(long, default_value = "stability.json")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// high_dim, correlated or kernel_sweep.
    #[arg(long)]
    pub scenario: Scenario,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub units: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub correlations: Option<Vec<f64>>,
    /// Multiples of the default kernel width.
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
    #[arg(long)]
    pub sweep_unit: Option<f64>,
    #[arg(long)]
    pub base_dim: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long, default_value = "probe.json")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Evaluation report or explanation document.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the input file name with an `.svg` extension.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}
