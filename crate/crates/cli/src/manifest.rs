//! The run manifest: every knob that determines a run's outputs, written
//! as canonical JSON next to those outputs. A stage run in an existing
//! directory starts from the stored manifest, applies explicit flag
//! overrides, and writes the result back, so chained stages agree on
//! every parameter without repeating flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pathway_core::canonical;
use pathway_core::learner::Hyperparameters;
use pathway_core::policy::CostParams;
use pathway_core::scenario::{generate_scenario, load_scenario};
use pathway_core::ScenarioConfig64;

use crate::cli::StageArgs;
use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SCENARIO_FILE: &str = "scenario.json";
pub const COHORT_FILE: &str = "cohort.csv";
pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_SUMMARY_FILE: &str = "train_summary.txt";
pub const CURVE_FILE: &str = "curve.csv";
pub const CURVE_SVG_FILE: &str = "curve.svg";
pub const THRESHOLD_FILE: &str = "threshold.txt";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Master seed; every stage derives its own purpose-tagged streams.
    pub master_seed: u64,
    /// External scenario file; when absent the built-in world is
    /// generated from the master seed.
    pub scenario_path: Option<String>,
    /// Optional horizon override applied to the scenario, in days.
    pub horizon_days: Option<usize>,
    /// Training trajectories per syndrome.
    pub per_syndrome: usize,
    /// Snapshot stride for training rows, in days.
    pub snapshot_stride_days: usize,
    pub hyper: Hyperparameters,
    pub costs: CostParams<f64>,
    /// Threshold grid size over [0, 1].
    pub grid_points: usize,
    /// Evaluation cohort size for cost estimation.
    pub n_eval: usize,
    pub out_dir: String,
}

impl RunManifest {
    fn defaults(out_dir: String) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: 42,
            scenario_path: None,
            horizon_days: None,
            per_syndrome: 100,
            snapshot_stride_days: 30,
            hyper: Hyperparameters::default(),
            costs: CostParams::default(),
            grid_points: 101,
            n_eval: 2000,
            out_dir,
        }
    }

    /// Stored manifest (if any) with flag overrides applied.
    pub fn resolve(args: &StageArgs) -> Result<Self, CliError> {
        let out_dir = args.out.display().to_string();
        let stored = args.out.join(MANIFEST_FILE);
        let mut manifest = if stored.is_file() {
            let text = fs::read_to_string(&stored)?;
            let mut m: RunManifest = serde_json::from_str(&text).map_err(|e| {
                CliError::Validation(format!("invalid manifest {}: {e}", stored.display()))
            })?;
            m.tool_version = env!("CARGO_PKG_VERSION").to_string();
            m.out_dir = out_dir;
            m
        } else {
            Self::defaults(out_dir)
        };

        if let Some(path) = &args.scenario {
            manifest.scenario_path = Some(path.display().to_string());
        }
        if let Some(seed) = args.seed {
            manifest.master_seed = seed;
        }
        if let Some(horizon) = args.horizon {
            manifest.horizon_days = Some(horizon);
        }
        if let Some(n) = args.per_syndrome {
            manifest.per_syndrome = n;
        }
        if let Some(stride) = args.stride {
            manifest.snapshot_stride_days = stride;
        }
        if let Some(trees) = args.trees {
            manifest.hyper.tree_count = trees;
        }
        if let Some(depth) = args.max_depth {
            manifest.hyper.max_depth = depth;
        }
        if let Some(leaf) = args.min_leaf {
            manifest.hyper.min_leaf_size = leaf;
        }
        if let Some(k) = args.features_per_split {
            manifest.hyper.features_per_split = Some(k);
        }
        if let Some(points) = args.grid_points {
            manifest.grid_points = points;
        }
        if let Some(n) = args.n_eval {
            manifest.n_eval = n;
        }
        if let Some(c) = args.cost_wandering_per_day {
            manifest.costs.cost_wandering_per_day = c;
        }
        if let Some(c) = args.cost_specialist {
            manifest.costs.cost_specialist = c;
        }
        if let Some(c) = args.cost_non_specialist {
            manifest.costs.cost_non_specialist = c;
        }
        if let Some(c) = args.cost_mean_wandering_days {
            manifest.costs.mean_wandering_days = c;
        }
        if let Some(c) = args.cost_mean_physicians {
            manifest.costs.mean_physicians_consulted = c;
        }

        manifest.validate()?;
        Ok(manifest)
    }

    fn validate(&self) -> Result<(), CliError> {
        let mut problems = Vec::new();
        if self.snapshot_stride_days == 0 {
            problems.push("snapshot stride must be at least 1 day");
        }
        if self.grid_points == 0 {
            problems.push("grid must have at least one point");
        }
        if self.n_eval == 0 {
            problems.push("evaluation cohort must have at least one patient");
        }
        if self.horizon_days == Some(0) {
            problems.push("horizon must be at least 1 day");
        }
        let c = &self.costs;
        if ![
            c.cost_wandering_per_day,
            c.cost_specialist,
            c.cost_non_specialist,
            c.mean_wandering_days,
            c.mean_physicians_consulted,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
        {
            problems.push("cost parameters must be finite and nonnegative");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(problems.join("; ")))
        }
    }

    pub fn out_path(&self, file: &str) -> PathBuf {
        Path::new(&self.out_dir).join(file)
    }

    /// Persist the manifest into the run directory.
    pub fn write(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out_dir)?;
        canonical::write_canonical_json(&self.out_path(MANIFEST_FILE), self)?;
        Ok(())
    }

    /// The scenario this run works on: an external file if configured,
    /// the stage's own `scenario.json` if present, else the built-in
    /// world generated from the master seed.
    pub fn scenario(&self) -> Result<ScenarioConfig64, CliError> {
        let mut config = if let Some(path) = &self.scenario_path {
            load_scenario(Path::new(path))?
        } else {
            let local = self.out_path(SCENARIO_FILE);
            if local.is_file() {
                load_scenario(&local)?
            } else {
                generate_scenario(self.master_seed)
            }
        };
        if let Some(horizon) = self.horizon_days {
            config.horizon_days = horizon;
        }
        Ok(config)
    }

    /// The built-in world for `generate`: always regenerated from the
    /// master seed, never read back from an earlier run.
    pub fn generate_world(&self) -> Result<ScenarioConfig64, CliError> {
        if let Some(path) = &self.scenario_path {
            return Err(CliError::Validation(format!(
                "generate creates the built-in world from --seed; --scenario {path} is not applicable"
            )));
        }
        let mut config: ScenarioConfig64 = generate_scenario(self.master_seed);
        if let Some(horizon) = self.horizon_days {
            config.horizon_days = horizon;
        }
        Ok(config)
    }

    /// Training-cohort sizes: `per_syndrome` for every syndrome.
    pub fn counts(&self, config: &ScenarioConfig64) -> Vec<usize> {
        vec![self.per_syndrome; config.syndrome_count()]
    }

    /// Evenly spaced threshold grid over [0, 1].
    pub fn grid(&self) -> Vec<f64> {
        if self.grid_points == 1 {
            return vec![0.0];
        }
        (0..self.grid_points)
            .map(|i| i as f64 / (self.grid_points - 1) as f64)
            .collect()
    }
}
