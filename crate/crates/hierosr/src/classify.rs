//! Score-based and traversal-based assignment of samples to hierarchy nodes.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledSample;
use crate::embedding::EmbeddingVector;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, NodeId};
use crate::models::{is_inlier, pick_child, ChildSide, NodeModelSet};
use crate::parallel::{maybe_par_try_map, seq_try_map};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationMode {
    #[default]
    ScoreBased,
    TraversalBased,
}

/// Classification settings. `depth_bonus` adds `depth_bonus * depth(t)` to
/// every node score, biasing score-based predictions toward deeper (more
/// specific) nodes; 0 leaves the raw standardized score. Ties always break
/// deeper-then-lower-id.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub mode: ClassificationMode,
    pub depth_bonus: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            mode: ClassificationMode::ScoreBased,
            depth_bonus: 0.0,
        }
    }
}

impl ClassifierConfig {
    fn validate(&self) -> Result<()> {
        if !(self.depth_bonus >= 0.0 && self.depth_bonus.is_finite()) {
            return Err(Error::invalid_argument(format!(
                "depth_bonus must be finite and >= 0, got {}",
                self.depth_bonus
            )));
        }
        Ok(())
    }
}

/// Where a sample landed in the hierarchy: a leaf for "looks like this known
/// class", an internal node for "unknown, related to this subtree".
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationResult {
    pub sample_id: String,
    pub true_label: Option<String>,
    pub predicted_node: NodeId,
    /// Root-to-prediction node ids.
    pub path: Vec<NodeId>,
    /// Higher = more likely to belong to a known class.
    pub knownness_score: f64,
    pub is_leaf_prediction: bool,
    /// Traversal mode only: the root detector's verdict, recorded as
    /// metadata (it never blocks classification).
    pub root_inlier: Option<bool>,
}

/// Standardized fit score of a sample at a node:
/// `-(||x - centroid|| - mean_dist) / max(std_dist, epsilon) + depth_bonus * depth`.
/// Higher is better.
pub fn node_score(
    x: &EmbeddingVector,
    node: NodeId,
    hierarchy: &Hierarchy,
    models: &NodeModelSet,
    config: &ClassifierConfig,
) -> Result<f64> {
    config.validate()?;
    let stats = models.stats_for(node)?;
    let depth = hierarchy.node(node)?.depth;
    let d = x.euclidean_distance(&stats.centroid)?;
    let denom = stats.std_dist.max(models.epsilon);
    Ok(-(d - stats.mean_dist) / denom + config.depth_bonus * depth as f64)
}

/// Assign `x` to the node with the maximum score over the whole tree.
/// The knownness score is the best score attained at any leaf.
pub fn classify_score_based(
    x: &EmbeddingVector,
    hierarchy: &Hierarchy,
    models: &NodeModelSet,
    config: &ClassifierConfig,
) -> Result<ClassificationResult> {
    config.validate()?;
    let mut best: Option<(f64, usize, NodeId)> = None;
    let mut best_leaf_score = f64::NEG_INFINITY;
    for node in hierarchy.nodes() {
        let score = node_score(x, node.id, hierarchy, models, config)?;
        if node.is_leaf() && score > best_leaf_score {
            best_leaf_score = score;
        }
        let replace = match &best {
            None => true,
            Some((s, d, _)) => {
                score > *s || (score == *s && node.depth > *d)
            }
        };
        if replace {
            best = Some((score, node.depth, node.id));
        }
    }
    let (_, _, predicted) = best.expect("hierarchy is nonempty");
    Ok(ClassificationResult {
        sample_id: String::new(),
        true_label: None,
        predicted_node: predicted,
        path: hierarchy.path_from_root(predicted)?,
        knownness_score: best_leaf_score,
        is_leaf_prediction: hierarchy.node(predicted)?.is_leaf(),
        root_inlier: None,
    })
}

/// Root-to-leaf descent guided by the children's outlier detectors, with the
/// child classifier resolving both-inlier conflicts. Stops at an internal
/// node when both children reject the sample. The knownness score is the
/// smallest inlier margin committed to along the way.
pub fn classify_traversal(
    x: &EmbeddingVector,
    hierarchy: &Hierarchy,
    models: &NodeModelSet,
) -> Result<ClassificationResult> {
    let root = hierarchy.root_id();
    let root_inlier = {
        let (inside, _) = is_inlier(models.detector_for(root)?, models.stats_for(root)?, x)?;
        Some(inside)
    };

    let mut current = root;
    let mut margins: Vec<f64> = Vec::new();
    loop {
        let node = hierarchy.node(current)?;
        let Some((left, right)) = node.children else {
            break;
        };
        let (l_in, l_margin) =
            is_inlier(models.detector_for(left)?, models.stats_for(left)?, x)?;
        let (r_in, r_margin) =
            is_inlier(models.detector_for(right)?, models.stats_for(right)?, x)?;
        match (l_in, r_in) {
            (false, false) => {
                margins.push(l_margin.max(r_margin));
                break;
            }
            (true, false) => {
                margins.push(l_margin);
                current = left;
            }
            (false, true) => {
                margins.push(r_margin);
                current = right;
            }
            (true, true) => {
                let (side, _) = pick_child(models.classifier_for(current)?, x)?;
                match side {
                    ChildSide::Left => {
                        margins.push(l_margin);
                        current = left;
                    }
                    ChildSide::Right => {
                        margins.push(r_margin);
                        current = right;
                    }
                }
            }
        }
    }

    let knownness = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let knownness = if knownness.is_finite() {
        knownness
    } else {
        // Single-node tree: fall back to the root detector margin.
        is_inlier(models.detector_for(root)?, models.stats_for(root)?, x)?.1
    };
    Ok(ClassificationResult {
        sample_id: String::new(),
        true_label: None,
        predicted_node: current,
        path: hierarchy.path_from_root(current)?,
        knownness_score: knownness,
        is_leaf_prediction: hierarchy.node(current)?.is_leaf(),
        root_inlier,
    })
}

fn classify_one(
    sample: &LabeledSample,
    hierarchy: &Hierarchy,
    models: &NodeModelSet,
    config: &ClassifierConfig,
) -> Result<ClassificationResult> {
    let mut result = match config.mode {
        ClassificationMode::ScoreBased => {
            classify_score_based(&sample.embedding, hierarchy, models, config)
        }
        ClassificationMode::TraversalBased => {
            classify_traversal(&sample.embedding, hierarchy, models)
        }
    }
    .map_err(|e| Error::for_sample(&sample.sample_id, e))?;
    result.sample_id = sample.sample_id.clone();
    result.true_label = Some(sample.label.clone());
    Ok(result)
}

/// Classify a batch in input order, fanning out across worker threads when
/// built with the `parallel` feature.
pub fn classify_batch(
    samples: &[LabeledSample],
    hierarchy: &Hierarchy,
    models: &NodeModelSet,
    config: &ClassifierConfig,
) -> Result<Vec<ClassificationResult>> {
    maybe_par_try_map(samples, |s| classify_one(s, hierarchy, models, config))
}

/// Sequential twin of [`classify_batch`], for benchmarks and fallback.
pub fn classify_batch_seq(
    samples: &[LabeledSample],
    hierarchy: &Hierarchy,
    models: &NodeModelSet,
    config: &ClassifierConfig,
) -> Result<Vec<ClassificationResult>> {
    seq_try_map(samples, |s| classify_one(s, hierarchy, models, config))
}
