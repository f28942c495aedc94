//! Evaluation metrics: Utility, Concentration Centrality and its class-level
//! maximum, plus the standard open-set measures (AUC ROC, precision, recall,
//! F1) and classical closeness centrality as a comparison utility.

use std::collections::BTreeMap;

use crate::classify::ClassificationResult;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, NodeId};
use crate::parallel::maybe_par_try_map;

/// Where each sample of one class landed: P(t, k), the proportion of class-k
/// assignments at node t. Proportions sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentDistribution {
    pub class_label: String,
    pub proportions: BTreeMap<NodeId, f64>,
}

impl AssignmentDistribution {
    pub fn new(class_label: impl Into<String>, proportions: BTreeMap<NodeId, f64>) -> Result<Self> {
        let sum: f64 = proportions.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid_argument(format!(
                "assignment proportions sum to {sum}, expected 1"
            )));
        }
        if let Some((node, p)) = proportions.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid_argument(format!(
                "proportion {p} at node {node} outside [0, 1]"
            )));
        }
        Ok(AssignmentDistribution {
            class_label: class_label.into(),
            proportions,
        })
    }
}

/// How non-leaf-ancestor predictions are scored by [`utility`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UtilityMode {
    /// Credit depth(M(x)) / depth(leaf) only when the prediction lies on the
    /// root path of the true leaf; anything else scores 0.
    #[default]
    AncestorOnly,
    /// The raw depth ratio regardless of where the prediction sits.
    Literal,
}

/// Mean over samples of depth(M(x)) / depth(true leaf), in [0, 1] under
/// [`UtilityMode::AncestorOnly`]. Every true label must be a known class.
pub fn utility(results: &[ClassificationResult], hierarchy: &Hierarchy) -> Result<f64> {
    utility_with_mode(results, hierarchy, UtilityMode::AncestorOnly)
}

pub fn utility_with_mode(
    results: &[ClassificationResult],
    hierarchy: &Hierarchy,
    mode: UtilityMode,
) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::invalid_argument("utility of zero samples"));
    }
    let mut total = 0.0;
    for r in results {
        let label = r.true_label.as_deref().ok_or_else(|| {
            Error::invalid_argument(format!("sample {} has no true label", r.sample_id))
        })?;
        let leaf = hierarchy.leaf_for_class(label).ok_or_else(|| {
            Error::invalid_argument(format!("true label {label} is not a known class"))
        })?;
        let leaf_depth = hierarchy.node(leaf)?.depth;
        if leaf_depth == 0 {
            return Err(Error::invalid_argument(
                "utility is undefined for a single-node hierarchy",
            ));
        }
        let pred_depth = hierarchy.node(r.predicted_node)?.depth;
        let credit = match mode {
            UtilityMode::Literal => pred_depth as f64 / leaf_depth as f64,
            UtilityMode::AncestorOnly => {
                if hierarchy.is_ancestor_or_self(r.predicted_node, leaf)? {
                    pred_depth as f64 / leaf_depth as f64
                } else {
                    0.0
                }
            }
        };
        total += credit;
    }
    Ok(total / results.len() as f64)
}

/// P(t, k) over the results whose true label is `k`.
pub fn assignment_distribution(
    results: &[ClassificationResult],
    class_label: &str,
) -> Result<AssignmentDistribution> {
    let mut counts: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut total = 0usize;
    for r in results {
        if r.true_label.as_deref() == Some(class_label) {
            *counts.entry(r.predicted_node).or_insert(0) += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::invalid_argument(format!(
            "no samples with true label {class_label}"
        )));
    }
    let proportions = counts
        .into_iter()
        .map(|(node, c)| (node, c as f64 / total as f64))
        .collect();
    AssignmentDistribution::new(class_label, proportions)
}

/// CC over an explicit distance row: `1 - sum(d(t,t')/d_max(t) * P(t'))`,
/// where `distances[i]` is the tree distance from the focal node to node `i`
/// and `d_max` is the row maximum. Defined as 1 when the graph has a single
/// node. The result is clamped to [0, 1].
pub fn concentration_centrality_from_distances(
    distances: &[usize],
    proportions: &BTreeMap<NodeId, f64>,
) -> Result<f64> {
    let d_max = distances.iter().copied().max().unwrap_or(0);
    if d_max == 0 {
        return Ok(1.0);
    }
    let mut weighted = 0.0;
    for (&node, &p) in proportions {
        let d = *distances.get(node).ok_or_else(|| {
            Error::invalid_argument(format!("distribution references unknown node {node}"))
        })?;
        weighted += d as f64 / d_max as f64 * p;
    }
    Ok((1.0 - weighted).clamp(0.0, 1.0))
}

/// Concentration Centrality of class `k` at node `t`: 1 minus the
/// proportion-weighted, max-normalized tree distance from `t`.
pub fn concentration_centrality(
    t: NodeId,
    dist: &AssignmentDistribution,
    hierarchy: &Hierarchy,
) -> Result<f64> {
    let distances = hierarchy.distances_from(t)?;
    concentration_centrality_from_distances(&distances, &dist.proportions)
}

/// The node maximizing CC for the class (ties to the lower node id) and the
/// maximum itself, the class's optimal concentration center and CCC score.
pub fn class_concentration_centrality(
    dist: &AssignmentDistribution,
    hierarchy: &Hierarchy,
) -> Result<(NodeId, f64)> {
    let mut best: Option<(NodeId, f64)> = None;
    for node in hierarchy.nodes() {
        let cc = concentration_centrality(node.id, dist, hierarchy)?;
        let replace = match best {
            None => true,
            Some((_, b)) => cc > b,
        };
        if replace {
            best = Some((node.id, cc));
        }
    }
    best.ok_or_else(|| Error::invalid_argument("empty hierarchy"))
}

/// Per-unseen-class optimal concentration centers. A class is unseen when
/// its label is not a hierarchy leaf.
pub fn per_class_ccc(
    results: &[ClassificationResult],
    hierarchy: &Hierarchy,
) -> Result<BTreeMap<String, (NodeId, f64)>> {
    let mut unseen: Vec<String> = results
        .iter()
        .filter_map(|r| r.true_label.clone())
        .filter(|label| hierarchy.leaf_for_class(label).is_none())
        .collect();
    unseen.sort();
    unseen.dedup();
    if unseen.is_empty() {
        return Err(Error::invalid_argument(
            "no unseen-class samples in the results",
        ));
    }
    let per_class = maybe_par_try_map(&unseen, |label| {
        let dist = assignment_distribution(results, label)?;
        let (node, ccc) = class_concentration_centrality(&dist, hierarchy)?;
        Ok((label.clone(), (node, ccc)))
    })?;
    Ok(per_class.into_iter().collect())
}

/// Unweighted mean CCC over the distinct unseen classes in the results.
pub fn mean_ccc(results: &[ClassificationResult], hierarchy: &Hierarchy) -> Result<f64> {
    let per_class = per_class_ccc(results, hierarchy)?;
    Ok(per_class.values().map(|(_, ccc)| ccc).sum::<f64>() / per_class.len() as f64)
}

/// AUC ROC in the Mann-Whitney formulation: the probability that a random
/// known sample outscores a random unknown one, ties counting one half.
/// `scores` pairs each knownness score with whether the sample is known.
pub fn roc_auc(scores: &[(f64, bool)]) -> Result<f64> {
    if scores.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::invalid_argument("NaN score"));
    }
    let pos = scores.iter().filter(|(_, known)| *known).count();
    let neg = scores.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid_argument(
            "AUC needs at least one known and one unknown sample",
        ));
    }

    // Rank sum with midranks for ties; exact for the pair-counting
    // definition because every intermediate is a multiple of 1/2.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].0.partial_cmp(&scores[b].0).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]].0 == scores[order[i]].0 {
            j += 1;
        }
        let midrank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if scores[idx].1 {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let p = pos as f64;
    let u = rank_sum_pos - p * (p + 1.0) / 2.0;
    Ok(u / (p * neg as f64))
}

/// Unknown-detection precision/recall/F1 with "unknown" as the positive
/// class: a prediction is positive iff it lands on a non-leaf node, a sample
/// is positive iff its true class is not a hierarchy leaf. Undefined ratios
/// fall back to 0 by convention.
pub fn precision_recall_f1(
    results: &[ClassificationResult],
    hierarchy: &Hierarchy,
) -> Result<(f64, f64, f64)> {
    if results.is_empty() {
        return Err(Error::invalid_argument("no results"));
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for r in results {
        let label = r.true_label.as_deref().ok_or_else(|| {
            Error::invalid_argument(format!("sample {} has no true label", r.sample_id))
        })?;
        let is_unknown = hierarchy.leaf_for_class(label).is_none();
        let predicted_unknown = !r.is_leaf_prediction;
        match (is_unknown, predicted_unknown) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = ratio_or_zero(tp, tp + fp);
    let recall = ratio_or_zero(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok((precision, recall, f1))
}

fn ratio_or_zero(num: usize, denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        num as f64 / denom as f64
    }
}

/// Classical closeness centrality over an explicit distance row: the
/// reciprocal of the summed shortest-path distances (0 for an isolated
/// node). Ships for comparison against CC, which adds class weighting and
/// max-distance normalization.
pub fn closeness_centrality(distances: &[usize]) -> f64 {
    let sum: usize = distances.iter().sum();
    if sum == 0 {
        0.0
    } else {
        1.0 / sum as f64
    }
}

/// Closeness centrality of a hierarchy node.
pub fn hierarchy_closeness_centrality(hierarchy: &Hierarchy, t: NodeId) -> Result<f64> {
    Ok(closeness_centrality(&hierarchy.distances_from(t)?))
}
