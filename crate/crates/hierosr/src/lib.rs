//! Open-set recognition over an automatically built class hierarchy.
//!
//! The pipeline: summarize each known class by the centroid of its labeled
//! embeddings, grow a full binary hierarchy over those class embeddings with
//! constrained agglomerative clustering, fit per-node outlier detectors and
//! child classifiers, then assign new samples to hierarchy nodes: leaves
//! mean "this known class", internal nodes mean "unknown, but related to
//! this subtree". Evaluation covers AUC ROC, precision/recall/F1, the
//! depth-ratio utility score, and concentration centrality, which measures
//! how tightly a class's predictions cluster around one node.
//!
//! Batch operations (classification, per-node fitting, per-class metrics)
//! run data-parallel under the default `parallel` feature and fall back to
//! sequential loops without it.

pub mod classify;
pub mod cluster;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod hierarchy;
pub mod io;
pub mod metrics;
pub mod models;
pub mod parallel;
pub mod report;
pub mod split;
pub mod synth;

pub use classify::{
    classify_batch, classify_batch_seq, classify_score_based, classify_traversal, node_score,
    ClassificationMode, ClassificationResult, ClassifierConfig,
};
pub use cluster::{
    build_hierarchy, cluster_distance, compute_class_embeddings, ClassEmbedding,
    ClusteringConfig, ConstraintSet, DistanceMetric, Linkage, MergeKind, MergeLog, MergeRecord,
};
pub use dataset::{Dataset, LabeledSample};
pub use embedding::EmbeddingVector;
pub use error::{Error, Result};
pub use hierarchy::{Hierarchy, HierarchyNode, MergeStep, NodeId};
pub use metrics::{
    assignment_distribution, class_concentration_centrality, closeness_centrality,
    concentration_centrality, concentration_centrality_from_distances,
    hierarchy_closeness_centrality, mean_ccc, per_class_ccc, precision_recall_f1, roc_auc,
    utility, utility_with_mode, AssignmentDistribution, UtilityMode,
};
pub use models::{
    fit_node_models, fit_node_models_seq, is_inlier, pick_child, ChildClassifier, ChildSide,
    NodeModelSet, NodeStats, OutlierDetector, DEFAULT_EPSILON, DEFAULT_PERCENTILE,
};
pub use report::MetricsReport;
pub use split::{open_set_split, UnseenSpec};
pub use synth::{generate, SynthConfig, SynthOutput};
