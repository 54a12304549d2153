//! Feature extraction and the random-forest rare-disease predictor.

mod features;
mod forest;

pub use features::{build_training_set, extract_features, FeatureVector, TrainingSet};
pub use forest::{
    load_forest, oob_accuracy, predict_proba, save_forest, train_forest, Forest, Hyperparameters,
    Tree, TreeNode, MODEL_FORMAT_VERSION,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error(
        "history has no observed symptom; features are undefined before the first observation"
    )]
    EmptyHistory,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set is single-class ({positives} positive, {negatives} negative rows); a trainable set needs both")]
    SingleClass { positives: usize, negatives: usize },
    #[error("invalid hyperparameter {name}: {message}")]
    InvalidHyperparameter { name: &'static str, message: String },
    #[error("feature dimension mismatch: forest expects {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("failed to read model {path}: {source}")]
    ModelRead {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to write model {path}: {source}")]
    ModelWrite {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse model {path}: {source}")]
    ModelParse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },
    #[error("malformed model: {0}")]
    ModelStructure(String),
}
