//! Per-node statistics, outlier detectors and child classifiers.
//!
//! Every hierarchy node gets centroid/dispersion stats over the training
//! samples below it and a distance-percentile outlier threshold; every
//! internal node additionally gets a nearest-child-centroid binary
//! classifier. These models back both classification procedures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::embedding::EmbeddingVector;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, NodeId};
use crate::parallel::{maybe_par_try_map, seq_try_map};

/// Substituted for a zero standard deviation wherever it would be divided by.
pub const DEFAULT_EPSILON: f64 = 1e-9;

pub const DEFAULT_PERCENTILE: f64 = 95.0;

/// Centroid and distance dispersion of the training samples under one node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    pub node_id: NodeId,
    pub centroid: EmbeddingVector,
    /// Mean training distance to the centroid.
    pub mean_dist: f64,
    /// Population standard deviation of those distances.
    pub std_dist: f64,
    pub train_count: usize,
}

/// Distance-to-centroid cutoff fitted at a percentile of training distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutlierDetector {
    pub node_id: NodeId,
    pub threshold: f64,
    pub percentile: f64,
}

/// Nearest-centroid binary classifier between an internal node's children.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChildClassifier {
    pub parent_node_id: NodeId,
    pub left_centroid: EmbeddingVector,
    pub right_centroid: EmbeddingVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChildSide {
    Left,
    Right,
}

/// The full set of fitted models for one hierarchy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeModelSet {
    pub stats: BTreeMap<NodeId, NodeStats>,
    pub detectors: BTreeMap<NodeId, OutlierDetector>,
    pub classifiers: BTreeMap<NodeId, ChildClassifier>,
    pub epsilon: f64,
}

impl NodeModelSet {
    pub fn stats_for(&self, node: NodeId) -> Result<&NodeStats> {
        self.stats
            .get(&node)
            .ok_or_else(|| Error::invalid_state(format!("no fitted stats for node {node}")))
    }

    pub fn detector_for(&self, node: NodeId) -> Result<&OutlierDetector> {
        self.detectors
            .get(&node)
            .ok_or_else(|| Error::invalid_state(format!("no fitted detector for node {node}")))
    }

    pub fn classifier_for(&self, node: NodeId) -> Result<&ChildClassifier> {
        self.classifiers.get(&node).ok_or_else(|| {
            Error::invalid_state(format!("no fitted child classifier for node {node}"))
        })
    }

    /// Structural consistency against a hierarchy: stats and detectors on
    /// every node, classifiers on every internal node.
    pub fn validate_against(&self, hierarchy: &Hierarchy) -> Vec<String> {
        let mut violations = Vec::new();
        for node in hierarchy.nodes() {
            if !self.stats.contains_key(&node.id) {
                violations.push(format!("node {}: missing stats", node.id));
            }
            if !self.detectors.contains_key(&node.id) {
                violations.push(format!("node {}: missing detector", node.id));
            }
            if !node.is_leaf() && !self.classifiers.contains_key(&node.id) {
                violations.push(format!("node {}: missing child classifier", node.id));
            }
        }
        let known = |id: &NodeId| hierarchy.node(*id).is_ok();
        if !self.stats.keys().all(&known)
            || !self.detectors.keys().all(&known)
            || !self.classifiers.keys().all(&known)
        {
            violations.push("model keyed by unknown node id".to_string());
        }
        if !(self.epsilon > 0.0) {
            violations.push(format!("epsilon {} must be positive", self.epsilon));
        }
        violations
    }
}

/// Percentile by linear interpolation over the sorted values
/// (rank = p/100 * (m-1)), matching the usual "linear" convention.
fn percentile_linear(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = rank - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Fit stats, outlier detectors and child classifiers for every node.
///
/// Requires at least one training sample per hierarchy class; the detector
/// threshold is the `percentile` rank of the node's training distances.
pub fn fit_node_models(
    hierarchy: &Hierarchy,
    train: &Dataset,
    percentile: f64,
) -> Result<NodeModelSet> {
    fit_impl(hierarchy, train, percentile, true)
}

/// Sequential twin of [`fit_node_models`], for benchmarks and fallback.
pub fn fit_node_models_seq(
    hierarchy: &Hierarchy,
    train: &Dataset,
    percentile: f64,
) -> Result<NodeModelSet> {
    fit_impl(hierarchy, train, percentile, false)
}

fn fit_impl(
    hierarchy: &Hierarchy,
    train: &Dataset,
    percentile: f64,
    parallel: bool,
) -> Result<NodeModelSet> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::invalid_argument(format!(
            "percentile must be in (0, 100], got {percentile}"
        )));
    }
    let by_class = train.by_class();
    for class in hierarchy.classes() {
        if !by_class.contains_key(class) {
            return Err(Error::invalid_argument(format!(
                "class {class} has no training samples"
            )));
        }
    }

    let node_ids: Vec<NodeId> = hierarchy.nodes().map(|n| n.id).collect();
    let fit_one = |&id: &NodeId| -> Result<(NodeStats, OutlierDetector)> {
        let node = hierarchy.node(id)?;
        let embeddings: Vec<&EmbeddingVector> = node
            .member_classes
            .iter()
            .flat_map(|class| by_class[class.as_str()].iter().map(|s| &s.embedding))
            .collect();
        let centroid = EmbeddingVector::mean(embeddings.iter().copied())?;
        let mut dists = embeddings
            .iter()
            .map(|e| e.euclidean_distance(&centroid))
            .collect::<Result<Vec<f64>>>()?;
        let count = dists.len();
        let mean = dists.iter().sum::<f64>() / count as f64;
        let var = dists.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / count as f64;
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let threshold = percentile_linear(&dists, percentile);
        Ok((
            NodeStats {
                node_id: id,
                centroid,
                mean_dist: mean,
                std_dist: var.sqrt(),
                train_count: count,
            },
            OutlierDetector {
                node_id: id,
                threshold,
                percentile,
            },
        ))
    };
    let fitted = if parallel {
        maybe_par_try_map(&node_ids, fit_one)?
    } else {
        seq_try_map(&node_ids, fit_one)?
    };

    let mut stats = BTreeMap::new();
    let mut detectors = BTreeMap::new();
    for (s, d) in fitted {
        detectors.insert(d.node_id, d);
        stats.insert(s.node_id, s);
    }

    let mut classifiers = BTreeMap::new();
    for node in hierarchy.nodes() {
        if let Some((left, right)) = node.children {
            classifiers.insert(
                node.id,
                ChildClassifier {
                    parent_node_id: node.id,
                    left_centroid: stats[&left].centroid.clone(),
                    right_centroid: stats[&right].centroid.clone(),
                },
            );
        }
    }

    Ok(NodeModelSet {
        stats,
        detectors,
        classifiers,
        epsilon: DEFAULT_EPSILON,
    })
}

/// Inlier test: inside iff distance to the node centroid is at most the
/// threshold (boundary inclusive). The margin is `threshold - distance`,
/// positive for inliers.
pub fn is_inlier(
    detector: &OutlierDetector,
    stats: &NodeStats,
    x: &EmbeddingVector,
) -> Result<(bool, f64)> {
    let d = x.euclidean_distance(&stats.centroid)?;
    Ok((d <= detector.threshold, detector.threshold - d))
}

/// Nearest child centroid, ties to the left; the margin is the absolute
/// distance difference.
pub fn pick_child(classifier: &ChildClassifier, x: &EmbeddingVector) -> Result<(ChildSide, f64)> {
    let d_left = x.euclidean_distance(&classifier.left_centroid)?;
    let d_right = x.euclidean_distance(&classifier.right_centroid)?;
    let side = if d_left <= d_right {
        ChildSide::Left
    } else {
        ChildSide::Right
    };
    Ok((side, (d_right - d_left).abs()))
}
