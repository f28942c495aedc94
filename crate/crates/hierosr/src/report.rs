//! Aggregation of one evaluation run into a serializable metrics report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::ClassificationResult;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, NodeId};
use crate::metrics::{
    per_class_ccc, precision_recall_f1, roc_auc, utility, utility_with_mode, UtilityMode,
};

/// One ROC operating point. `threshold: None` marks the synthetic endpoint
/// above every score (rate 0, 0); samples with score >= threshold are
/// predicted known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: Option<f64>,
    pub tpr: f64,
    pub fpr: f64,
}

/// The knownness threshold maximizing Youden's J (TPR - FPR), with the
/// unknown-detection precision/recall/F1 obtained at that threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoudenOperatingPoint {
    pub threshold: f64,
    pub j: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub known_samples: usize,
    pub unseen_samples: usize,
    pub known_classes: usize,
    pub unseen_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CccEntry {
    pub best_node: NodeId,
    pub ccc: f64,
}

/// Full evaluation of one classified open-set test run.
///
/// `precision`/`recall`/`f1` binarize known vs unknown at the structural
/// leaf/non-leaf decision; `youden` re-binarizes at the best knownness
/// threshold found on the ROC curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub auc_roc: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub utility: f64,
    pub utility_literal: f64,
    pub per_class_ccc: BTreeMap<String, CccEntry>,
    pub mean_ccc: f64,
    pub youden: YoudenOperatingPoint,
    pub roc_points: Vec<RocPoint>,
    pub counts: SampleCounts,
}

impl MetricsReport {
    /// Compute every metric from labeled classification results. Requires at
    /// least one known-class and one unseen-class sample.
    pub fn compute(results: &[ClassificationResult], hierarchy: &Hierarchy) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::invalid_argument("no results to evaluate"));
        }
        let mut known = Vec::new();
        let mut unseen_classes: Vec<&str> = Vec::new();
        let mut scores = Vec::with_capacity(results.len());
        for r in results {
            let label = r.true_label.as_deref().ok_or_else(|| {
                Error::invalid_argument(format!("sample {} has no true label", r.sample_id))
            })?;
            let is_known = hierarchy.leaf_for_class(label).is_some();
            scores.push((r.knownness_score, is_known));
            if is_known {
                known.push(r.clone());
            } else {
                unseen_classes.push(label);
            }
        }
        let unseen_count = scores.len() - known.len();
        if known.is_empty() || unseen_count == 0 {
            return Err(Error::invalid_argument(
                "evaluation needs both known-class and unseen-class samples",
            ));
        }
        unseen_classes.sort_unstable();
        unseen_classes.dedup();

        let auc = roc_auc(&scores)?;
        let (precision, recall, f1) = precision_recall_f1(results, hierarchy)?;
        let utility_value = utility(&known, hierarchy)?;
        let utility_literal = utility_with_mode(&known, hierarchy, UtilityMode::Literal)?;
        let ccc = per_class_ccc(results, hierarchy)?;
        let mean_ccc = ccc.values().map(|(_, v)| v).sum::<f64>() / ccc.len() as f64;
        let roc_points = roc_curve(&scores);
        let youden = youden_point(results, &scores, &roc_points, hierarchy)?;

        Ok(MetricsReport {
            auc_roc: auc,
            precision,
            recall,
            f1,
            utility: utility_value,
            utility_literal,
            per_class_ccc: ccc
                .into_iter()
                .map(|(label, (best_node, v))| (label, CccEntry { best_node, ccc: v }))
                .collect(),
            mean_ccc,
            youden,
            roc_points,
            counts: SampleCounts {
                known_samples: known.len(),
                unseen_samples: unseen_count,
                known_classes: hierarchy.classes().count(),
                unseen_classes: unseen_classes.len(),
            },
        })
    }
}

/// ROC polyline: one point per distinct score threshold, descending, plus
/// the (0,0) endpoint. Predict known iff score >= threshold.
fn roc_curve(scores: &[(f64, bool)]) -> Vec<RocPoint> {
    let pos = scores.iter().filter(|(_, k)| *k).count();
    let neg = scores.len() - pos;
    let mut thresholds: Vec<f64> = scores.iter().map(|(s, _)| *s).collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut points = vec![RocPoint {
        threshold: None,
        tpr: 0.0,
        fpr: 0.0,
    }];
    for t in thresholds {
        let tp = scores.iter().filter(|(s, k)| *k && *s >= t).count();
        let fp = scores.iter().filter(|(s, k)| !*k && *s >= t).count();
        points.push(RocPoint {
            threshold: Some(t),
            tpr: tp as f64 / pos as f64,
            fpr: fp as f64 / neg as f64,
        });
    }
    points
}

fn youden_point(
    results: &[ClassificationResult],
    scores: &[(f64, bool)],
    roc_points: &[RocPoint],
    hierarchy: &Hierarchy,
) -> Result<YoudenOperatingPoint> {
    let mut best: Option<(f64, f64)> = None; // (threshold, J)
    for p in roc_points {
        let Some(t) = p.threshold else { continue };
        let j = p.tpr - p.fpr;
        let replace = match best {
            None => true,
            Some((_, bj)) => j > bj,
        };
        if replace {
            best = Some((t, j));
        }
    }
    let (threshold, j) = best.expect("at least one finite threshold");

    // Re-binarize at the threshold: predicted unknown iff score < threshold.
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (r, (score, is_known)) in results.iter().zip(scores) {
        debug_assert_eq!(r.knownness_score, *score);
        let predicted_unknown = *score < threshold;
        match (!is_known, predicted_unknown) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    let _ = hierarchy;
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(YoudenOperatingPoint {
        threshold,
        j,
        precision,
        recall,
        f1,
    })
}
