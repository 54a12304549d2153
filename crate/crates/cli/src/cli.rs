//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "pathway",
    version,
    about = "Simulate patient pathways, train a rare-disease alert model, and optimize its referral threshold"
)]
pub struct Cli {
    /// Worker threads for simulation, training and evaluation (0 = all
    /// cores). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the built-in world model and write scenario.json
    Generate(StageArgs),
    /// Simulate the training cohort and write cohort.csv
    Simulate(StageArgs),
    /// Train the random-forest predictor on the cohort snapshots
    Train(StageArgs),
    /// Estimate expected cost over the threshold grid and pick the optimum
    Sweep(StageArgs),
    /// Emit the per-day predictions of one training trajectory
    Trace(TraceArgs),
    /// Run generate, simulate, train and sweep in one go
    All(StageArgs),
}

#[derive(Args, Debug, Clone)]
pub struct StageArgs {
    /// Run directory for inputs and outputs (created if missing)
    #[arg(long)]
    pub out: PathBuf,
    /// External scenario file; otherwise the built-in world is generated
    /// from the seed
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Master seed; every random stream of the run derives from it
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the scenario horizon, in days
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Training trajectories per syndrome
    #[arg(long)]
    pub per_syndrome: Option<usize>,
    /// Snapshot stride for training rows, in days
    #[arg(long)]
    pub stride: Option<usize>,
    /// Trees in the forest
    #[arg(long)]
    pub trees: Option<usize>,
    /// Maximum tree depth
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Minimum rows on each side of a split
    #[arg(long)]
    pub min_leaf: Option<usize>,
    /// Features examined per node (default: ceil(sqrt(feature count)))
    #[arg(long)]
    pub features_per_split: Option<usize>,
    /// Threshold grid size over [0, 1]
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Evaluation cohort size for cost estimation
    #[arg(long)]
    pub n_eval: Option<usize>,
    /// Cost per wandering day
    #[arg(long)]
    pub cost_wandering_per_day: Option<f64>,
    /// Cost of a specialist-center workup
    #[arg(long)]
    pub cost_specialist: Option<f64>,
    /// Cost of a non-specialist consultation
    #[arg(long)]
    pub cost_non_specialist: Option<f64>,
    /// Population-average wandering of an undetected rare-disease patient
    #[arg(long)]
    pub cost_mean_wandering_days: Option<f64>,
    /// Average physicians consulted by such a patient
    #[arg(long)]
    pub cost_mean_physicians: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub stage: StageArgs,
    /// Index of the trajectory to trace, in cohort order
    #[arg(long)]
    pub trajectory_id: usize,
}
