//! From-scratch random forest: CART-style trees with axis-aligned
//! Gini-impurity splits, bootstrap resampling, and per-node feature
//! subsampling.
//!
//! Training is a pure function of (data, hyperparameters, seed). Each tree
//! consumes its own child random stream, so trees can be grown in parallel
//! and still match the serial result bit for bit. Thresholds sit at
//! midpoints of consecutive distinct feature values and ties in Gini gain
//! resolve to the lowest feature index, then the lowest threshold.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical;
use crate::real::{real, Real};
use crate::rng::{purpose, RngStream};

use super::features::TrainingSet;
use super::LearnerError;

/// Forest training knobs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub tree_count: usize,
    /// Maximum split depth; 0 turns every tree into a root leaf.
    pub max_depth: usize,
    /// Minimum rows on each side of an admissible split.
    pub min_leaf_size: usize,
    /// Features examined per node; `None` means `ceil(sqrt(feature_count))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features_per_split: Option<usize>,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            tree_count: 100,
            max_depth: 12,
            min_leaf_size: 5,
            features_per_split: None,
        }
    }
}

impl Hyperparameters {
    fn resolve_features_per_split(&self, feature_count: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (feature_count as f64).sqrt().ceil() as usize)
    }
}

/// One node of a decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode<F> {
    Split {
        feature: usize,
        threshold: F,
        left: usize,
        right: usize,
    },
    Leaf {
        fraction: F,
        positives: usize,
        samples: usize,
    },
}

/// A decision tree stored as a flat node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<F> {
    pub nodes: Vec<TreeNode<F>>,
}

impl<F: Real> Tree<F> {
    /// Leaf positive fraction reached by a feature row. Rows with a value
    /// `<=` the threshold go left.
    pub fn leaf_fraction(&self, row: &[F]) -> F {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
                TreeNode::Leaf { fraction, .. } => return *fraction,
            }
        }
    }
}

/// A trained random forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest<F> {
    pub trees: Vec<Tree<F>>,
    pub hyper: Hyperparameters,
    pub training_seed: u64,
    pub feature_count: usize,
}

/// Model file format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile<F> {
    format_version: u32,
    forest: Forest<F>,
}

fn gini<F: Real>(positives: usize, samples: usize) -> F {
    if samples == 0 {
        return F::zero();
    }
    let p = F::from_usize(positives).unwrap() / F::from_usize(samples).unwrap();
    let q = F::one() - p;
    F::one() - p * p - q * q
}

/// Bootstrap row indices for one tree: `n` draws with replacement.
fn bootstrap_indices(stream: &mut RngStream, n: usize) -> Vec<usize> {
    (0..n).map(|_| stream.next_index(n)).collect()
}

/// `k` distinct feature indices in ascending order (partial Fisher–Yates).
fn feature_subset(stream: &mut RngStream, feature_count: usize, k: usize) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..feature_count).collect();
    let k = k.min(feature_count);
    for j in 0..k {
        let swap_with = j + stream.next_index(feature_count - j);
        indices.swap(j, swap_with);
    }
    let mut chosen = indices[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

struct TreeBuilder<'a, F: Real> {
    data: &'a TrainingSet<F>,
    max_depth: usize,
    min_leaf_size: usize,
    features_per_split: usize,
    nodes: Vec<TreeNode<F>>,
    rng: RngStream,
    // scratch buffer for (value, label) pairs at the current node
    scratch: Vec<(F, bool)>,
}

impl<'a, F: Real> TreeBuilder<'a, F> {
    fn grow(&mut self, rows: &[usize], depth: usize) -> usize {
        let samples = rows.len();
        let positives = rows.iter().filter(|&&r| self.data.labels[r]).count();
        let pure = positives == 0 || positives == samples;
        if depth >= self.max_depth || pure {
            return self.push_leaf(positives, samples);
        }
        let subset = feature_subset(
            &mut self.rng,
            self.data.feature_count,
            self.features_per_split,
        );
        let Some((feature, threshold)) = self.best_split(rows, positives, &subset) else {
            return self.push_leaf(positives, samples);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.data.features[r][feature] <= threshold);
        let node = self.nodes.len();
        // placeholder, patched once the children exist
        self.nodes.push(TreeNode::Split {
            feature,
            threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(&left_rows, depth + 1);
        let right = self.grow(&right_rows, depth + 1);
        self.nodes[node] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        node
    }

    fn push_leaf(&mut self, positives: usize, samples: usize) -> usize {
        let fraction = if samples == 0 {
            F::zero()
        } else {
            F::from_usize(positives).unwrap() / F::from_usize(samples).unwrap()
        };
        self.nodes.push(TreeNode::Leaf {
            fraction,
            positives,
            samples,
        });
        self.nodes.len() - 1
    }

    /// Best (feature, midpoint threshold) by Gini gain over the feature
    /// subset; `None` when no admissible split improves the parent.
    fn best_split(
        &mut self,
        rows: &[usize],
        positives: usize,
        subset: &[usize],
    ) -> Option<(usize, F)> {
        let n = rows.len();
        let parent = gini::<F>(positives, n);
        let n_f = F::from_usize(n).unwrap();
        let mut best: Option<(F, usize, F)> = None; // (gain, feature, threshold)
        for &feature in subset {
            self.scratch.clear();
            self.scratch.extend(
                rows.iter()
                    .map(|&r| (self.data.features[r][feature], self.data.labels[r])),
            );
            self.scratch
                .sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature"));
            let mut left_pos = 0usize;
            for i in 1..n {
                if self.scratch[i - 1].1 {
                    left_pos += 1;
                }
                if self.scratch[i - 1].0 == self.scratch[i].0 {
                    continue;
                }
                let left_n = i;
                let right_n = n - i;
                if left_n < self.min_leaf_size || right_n < self.min_leaf_size {
                    continue;
                }
                let right_pos = positives - left_pos;
                let weighted = (F::from_usize(left_n).unwrap() * gini::<F>(left_pos, left_n)
                    + F::from_usize(right_n).unwrap() * gini::<F>(right_pos, right_n))
                    / n_f;
                let gain = parent - weighted;
                if gain <= F::zero() {
                    continue;
                }
                // strict improvement only: earlier (feature, threshold)
                // wins ties by construction of the scan order
                if best.is_none_or(|(g, _, _)| gain > g) {
                    let threshold = (self.scratch[i - 1].0 + self.scratch[i].0) * real::<F>(0.5);
                    best = Some((gain, feature, threshold));
                }
            }
        }
        best.map(|(_, feature, threshold)| (feature, threshold))
    }
}

fn validate_hyper<F: Real>(
    data: &TrainingSet<F>,
    hyper: &Hyperparameters,
) -> Result<(), LearnerError> {
    if hyper.tree_count == 0 {
        return Err(LearnerError::InvalidHyperparameter {
            name: "tree_count",
            message: "must be at least 1".into(),
        });
    }
    if hyper.min_leaf_size == 0 {
        return Err(LearnerError::InvalidHyperparameter {
            name: "min_leaf_size",
            message: "must be at least 1".into(),
        });
    }
    if let Some(k) = hyper.features_per_split {
        if k == 0 || k > data.feature_count {
            return Err(LearnerError::InvalidHyperparameter {
                name: "features_per_split",
                message: format!("must be in [1, {}], found {k}", data.feature_count),
            });
        }
    }
    Ok(())
}

/// Train a forest. Deterministic in `(data, hyper, seed)`; tree `t` uses
/// the child stream `(seed, training, t)` for its bootstrap and feature
/// subsets, so parallel and serial training coincide.
pub fn train_forest<F: Real>(
    data: &TrainingSet<F>,
    hyper: &Hyperparameters,
    seed: u64,
) -> Result<Forest<F>, LearnerError> {
    if data.is_empty() {
        return Err(LearnerError::EmptyTrainingSet);
    }
    validate_hyper(data, hyper)?;
    let positives = data.labels.iter().filter(|&&l| l).count();
    let negatives = data.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(LearnerError::SingleClass {
            positives,
            negatives,
        });
    }
    debug_assert!(data.features.iter().all(|r| r.len() == data.feature_count));

    let features_per_split = hyper.resolve_features_per_split(data.feature_count);
    let root = RngStream::new(seed).derive(purpose::TRAINING);
    let trees: Vec<Tree<F>> = (0..hyper.tree_count)
        .into_par_iter()
        .map(|t| {
            let mut stream = root.derive(t as u64);
            let rows = bootstrap_indices(&mut stream, data.len());
            let mut builder = TreeBuilder {
                data,
                max_depth: hyper.max_depth,
                min_leaf_size: hyper.min_leaf_size,
                features_per_split,
                nodes: Vec::new(),
                rng: stream,
                scratch: Vec::with_capacity(data.len()),
            };
            builder.grow(&rows, 0);
            Tree {
                nodes: builder.nodes,
            }
        })
        .collect();

    Ok(Forest {
        trees,
        hyper: hyper.clone(),
        training_seed: seed,
        feature_count: data.feature_count,
    })
}

/// Rare-disease probability for a feature row: mean of per-tree leaf
/// fractions. The fractions are summed in sorted order, so the result is
/// invariant under any permutation of the trees.
pub fn predict_proba<F: Real>(forest: &Forest<F>, row: &[F]) -> Result<F, LearnerError> {
    if row.len() != forest.feature_count {
        return Err(LearnerError::DimensionMismatch {
            expected: forest.feature_count,
            found: row.len(),
        });
    }
    let mut fractions: Vec<F> = forest.trees.iter().map(|t| t.leaf_fraction(row)).collect();
    fractions.sort_unstable_by(|a, b| a.partial_cmp(b).expect("fractions are finite"));
    let sum = fractions.iter().fold(F::zero(), |acc, &f| acc + f);
    Ok(sum / F::from_usize(forest.trees.len()).unwrap())
}

/// Out-of-bag accuracy at the 0.5 vote threshold.
///
/// Replays each tree's bootstrap from the stored training seed, then
/// scores every row against the trees that never saw it. Returns `None`
/// when no row has an out-of-bag tree.
pub fn oob_accuracy<F: Real>(forest: &Forest<F>, data: &TrainingSet<F>) -> Option<f64> {
    let n = data.len();
    let root = RngStream::new(forest.training_seed).derive(purpose::TRAINING);
    let mut in_bag = vec![vec![false; n]; forest.trees.len()];
    for (t, bag) in in_bag.iter_mut().enumerate() {
        let mut stream = root.derive(t as u64);
        for row in bootstrap_indices(&mut stream, n) {
            bag[row] = true;
        }
    }
    let mut scored = 0usize;
    let mut correct = 0usize;
    for (row, features) in data.features.iter().enumerate() {
        let mut fractions: Vec<F> = forest
            .trees
            .iter()
            .enumerate()
            .filter(|(t, _)| !in_bag[*t][row])
            .map(|(_, tree)| tree.leaf_fraction(features))
            .collect();
        if fractions.is_empty() {
            continue;
        }
        fractions.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
        let mean = fractions.iter().fold(F::zero(), |acc, &f| acc + f)
            / F::from_usize(fractions.len()).unwrap();
        let predicted = mean > real::<F>(0.5);
        scored += 1;
        if predicted == data.labels[row] {
            correct += 1;
        }
    }
    (scored > 0).then(|| correct as f64 / scored as f64)
}

/// Persist a forest as a versioned canonical-JSON model file.
pub fn save_forest<F: Real + Serialize>(
    forest: &Forest<F>,
    path: &Path,
) -> Result<(), LearnerError> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        forest: forest.clone(),
    };
    canonical::write_canonical_json(path, &file).map_err(|source| LearnerError::ModelWrite {
        path: path.display().to_string(),
        source,
    })
}

/// Load a model file; predictions of the loaded forest reproduce the
/// saved forest bit for bit.
pub fn load_forest<F: Real + for<'de> Deserialize<'de>>(
    path: &Path,
) -> Result<Forest<F>, LearnerError> {
    let text = std::fs::read_to_string(path).map_err(|source| LearnerError::ModelRead {
        path: path.display().to_string(),
        source,
    })?;
    let file: ModelFile<F> =
        serde_json::from_str(&text).map_err(|source| LearnerError::ModelParse {
            path: path.display().to_string(),
            source,
        })?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(LearnerError::ModelVersion {
            found: file.format_version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let forest = file.forest;
    if forest.trees.is_empty() {
        return Err(LearnerError::ModelStructure("model has no trees".into()));
    }
    for (t, tree) in forest.trees.iter().enumerate() {
        for node in &tree.nodes {
            match node {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if *feature >= forest.feature_count
                        || *left >= tree.nodes.len()
                        || *right >= tree.nodes.len()
                    {
                        return Err(LearnerError::ModelStructure(format!(
                            "tree {t} has an out-of-range split"
                        )));
                    }
                    if !threshold.is_finite() {
                        return Err(LearnerError::ModelStructure(format!(
                            "tree {t} has a non-finite threshold"
                        )));
                    }
                }
                TreeNode::Leaf { fraction, .. } => {
                    if !(*fraction >= F::zero() && *fraction <= F::one()) {
                        return Err(LearnerError::ModelStructure(format!(
                            "tree {t} has a leaf fraction outside [0,1]"
                        )));
                    }
                }
            }
        }
    }
    Ok(forest)
}
