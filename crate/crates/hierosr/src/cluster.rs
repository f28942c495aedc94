//! Constrained agglomerative clustering over class embeddings.
//!
//! Each known class is summarized by the centroid of its training samples;
//! the hierarchy is grown bottom-up by repeatedly merging the closest pair
//! of clusters, honoring must-link and cannot-link constraints. The O(n^3)
//! recompute-everything formulation is deliberate: class counts are small
//! and determinism matters more than speed here.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::embedding::EmbeddingVector;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, MergeStep, NodeId};
use crate::parallel::maybe_par_try_map;

/// A known class summarized by the mean of its training embeddings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEmbedding {
    pub class_label: String,
    pub centroid: EmbeddingVector,
    pub sample_count: usize,
}

impl ClassEmbedding {
    pub fn new(
        class_label: impl Into<String>,
        centroid: EmbeddingVector,
        sample_count: usize,
    ) -> Result<Self> {
        if sample_count == 0 {
            return Err(Error::invalid_argument("sample_count must be >= 1"));
        }
        Ok(ClassEmbedding {
            class_label: class_label.into(),
            centroid,
            sample_count,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    Euclidean,
    Cosine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Single,
    Complete,
    Average,
}

/// How cluster-to-cluster distances are computed and whether a constraint
/// deadlock is resolved by relaxing or by failing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub distance_metric: DistanceMetric,
    pub linkage: Linkage,
    pub relax_constraints_when_stuck: bool,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            distance_metric: DistanceMetric::Euclidean,
            linkage: Linkage::Average,
            relax_constraints_when_stuck: true,
        }
    }
}

/// Unordered must-link / cannot-link class pairs. Pairs are stored with the
/// lexicographically smaller label first; a pair may not appear in both sets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConstraints", into = "RawConstraints")]
pub struct ConstraintSet {
    cannot_link: BTreeSet<(String, String)>,
    must_link: BTreeSet<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct RawConstraints {
    #[serde(default)]
    cannot_link: Vec<(String, String)>,
    #[serde(default)]
    must_link: Vec<(String, String)>,
}

impl TryFrom<RawConstraints> for ConstraintSet {
    type Error = Error;

    fn try_from(raw: RawConstraints) -> Result<Self> {
        ConstraintSet::new(raw.cannot_link, raw.must_link)
    }
}

impl From<ConstraintSet> for RawConstraints {
    fn from(c: ConstraintSet) -> RawConstraints {
        RawConstraints {
            cannot_link: c.cannot_link.into_iter().collect(),
            must_link: c.must_link.into_iter().collect(),
        }
    }
}

impl ConstraintSet {
    pub fn new(
        cannot_link: impl IntoIterator<Item = (String, String)>,
        must_link: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let cannot_link = canonical_pairs(cannot_link)?;
        let must_link = canonical_pairs(must_link)?;
        if let Some(pair) = cannot_link.intersection(&must_link).next() {
            return Err(Error::invalid_argument(format!(
                "pair ({}, {}) appears in both cannot_link and must_link",
                pair.0, pair.1
            )));
        }
        Ok(ConstraintSet {
            cannot_link,
            must_link,
        })
    }

    pub fn empty() -> Self {
        ConstraintSet::default()
    }

    pub fn cannot_link(&self) -> &BTreeSet<(String, String)> {
        &self.cannot_link
    }

    pub fn must_link(&self) -> &BTreeSet<(String, String)> {
        &self.must_link
    }

    pub fn is_empty(&self) -> bool {
        self.cannot_link.is_empty() && self.must_link.is_empty()
    }

    fn check_labels(&self, known: &BTreeSet<&str>) -> Result<()> {
        for (a, b) in self.cannot_link.iter().chain(&self.must_link) {
            for label in [a, b] {
                if !known.contains(label.as_str()) {
                    return Err(Error::invalid_argument(format!(
                        "constraint references unknown class {label}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn canonical_pairs(
    pairs: impl IntoIterator<Item = (String, String)>,
) -> Result<BTreeSet<(String, String)>> {
    let mut out = BTreeSet::new();
    for (a, b) in pairs {
        if a == b {
            return Err(Error::invalid_argument(format!(
                "constraint pair ({a}, {b}) links a class to itself"
            )));
        }
        let pair = if a < b { (a, b) } else { (b, a) };
        out.insert(pair);
    }
    Ok(out)
}

/// Why a merge happened, as recorded in the [`MergeLog`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeKind {
    /// Forced by a must-link constraint.
    MustLink,
    /// Ordinary minimum-distance merge.
    MinDistance,
    /// Minimum-distance merge performed despite a cannot-link violation,
    /// because no legal merge remained.
    Relaxed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub node_id: NodeId,
    pub left: NodeId,
    pub right: NodeId,
    pub distance: f64,
    pub kind: MergeKind,
}

/// The full merge history of one clustering run, including any constraint
/// relaxation warnings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MergeLog {
    pub entries: Vec<MergeRecord>,
    pub warnings: Vec<String>,
}

/// One class embedding per class: the arithmetic mean of the class's sample
/// embeddings, returned in lexicographic label order.
pub fn compute_class_embeddings(dataset: &Dataset) -> Result<Vec<ClassEmbedding>> {
    if dataset.is_empty() {
        return Err(Error::invalid_argument(
            "cannot compute class embeddings of an empty dataset",
        ));
    }
    dataset
        .by_class()
        .into_iter()
        .map(|(label, samples)| {
            let centroid = EmbeddingVector::mean(samples.iter().map(|s| &s.embedding))?;
            ClassEmbedding::new(label, centroid, samples.len())
        })
        .collect()
}

fn metric_distance(
    a: &EmbeddingVector,
    b: &EmbeddingVector,
    metric: DistanceMetric,
) -> Result<f64> {
    match metric {
        DistanceMetric::Euclidean => a.euclidean_distance(b),
        DistanceMetric::Cosine => a.cosine_distance(b),
    }
}

/// Linkage-aggregated distance between two disjoint clusters of class
/// embeddings: single = min, complete = max, average = unweighted mean over
/// all cross pairs of class centroids.
pub fn cluster_distance(
    a: &[ClassEmbedding],
    b: &[ClassEmbedding],
    config: &ClusteringConfig,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid_argument("clusters must be nonempty"));
    }
    let mut acc = LinkageAccumulator::new(config.linkage);
    for x in a {
        for y in b {
            acc.add(metric_distance(&x.centroid, &y.centroid, config.distance_metric)?);
        }
    }
    Ok(acc.value())
}

struct LinkageAccumulator {
    linkage: Linkage,
    best: f64,
    sum: f64,
    count: usize,
}

impl LinkageAccumulator {
    fn new(linkage: Linkage) -> Self {
        let best = match linkage {
            Linkage::Single => f64::INFINITY,
            Linkage::Complete => f64::NEG_INFINITY,
            Linkage::Average => 0.0,
        };
        LinkageAccumulator {
            linkage,
            best,
            sum: 0.0,
            count: 0,
        }
    }

    fn add(&mut self, d: f64) {
        match self.linkage {
            Linkage::Single => self.best = self.best.min(d),
            Linkage::Complete => self.best = self.best.max(d),
            Linkage::Average => {
                self.sum += d;
                self.count += 1;
            }
        }
    }

    fn value(&self) -> f64 {
        match self.linkage {
            Linkage::Average => self.sum / self.count as f64,
            _ => self.best,
        }
    }
}

/// An active cluster during agglomeration: the hierarchy node it corresponds
/// to and the class indices it covers. The representative label (smallest
/// member label) drives deterministic tie-breaking.
struct ActiveCluster {
    node_id: NodeId,
    members: Vec<usize>,
}

/// Build the class hierarchy by constrained agglomerative clustering.
///
/// Must-link pairs are merged first in ascending order of their class-pair
/// distance. Afterwards the closest pair of clusters whose union violates no
/// cannot-link constraint is merged, ties broken by the lexicographically
/// smallest (representative, representative) label pair. If only violating
/// merges remain, the run either relaxes (recording a warning) or fails,
/// depending on the config.
pub fn build_hierarchy(
    class_embeddings: &[ClassEmbedding],
    constraints: &ConstraintSet,
    config: &ClusteringConfig,
) -> Result<(Hierarchy, MergeLog)> {
    if class_embeddings.len() < 2 {
        return Err(Error::invalid_argument("need >= 2 classes"));
    }

    // Leaf ids follow lexicographic label order.
    let mut ordered: Vec<&ClassEmbedding> = class_embeddings.iter().collect();
    ordered.sort_by(|a, b| a.class_label.cmp(&b.class_label));
    let labels: Vec<String> = ordered.iter().map(|c| c.class_label.clone()).collect();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid_argument("duplicate class labels"));
    }
    let dim = ordered[0].centroid.dim();
    if ordered.iter().any(|c| c.centroid.dim() != dim) {
        return Err(Error::invalid_argument("class centroids differ in dimension"));
    }
    let known: BTreeSet<&str> = labels.iter().map(|s| s.as_str()).collect();
    constraints.check_labels(&known)?;

    let label_index = |label: &str| labels.iter().position(|l| l == label).unwrap();
    let cannot: Vec<(usize, usize)> = constraints
        .cannot_link
        .iter()
        .map(|(a, b)| (label_index(a), label_index(b)))
        .collect();

    let n = labels.len();
    let matrix = pairwise_matrix(&ordered, config)?;
    let pair = |i: usize, j: usize| matrix[i.min(j) * n + i.max(j)];

    let linkage_distance = |a: &[usize], b: &[usize]| -> f64 {
        let mut acc = LinkageAccumulator::new(config.linkage);
        for &i in a {
            for &j in b {
                acc.add(pair(i, j));
            }
        }
        acc.value()
    };
    let violates = |members: &[usize]| -> Option<(usize, usize)> {
        cannot
            .iter()
            .copied()
            .find(|(a, b)| members.contains(a) && members.contains(b))
    };

    let mut active: Vec<ActiveCluster> = (0..n)
        .map(|i| ActiveCluster {
            node_id: i,
            members: vec![i],
        })
        .collect();
    let mut merges: Vec<MergeStep> = Vec::with_capacity(n - 1);
    let mut log = MergeLog::default();

    let perform_merge =
        |active: &mut Vec<ActiveCluster>,
         merges: &mut Vec<MergeStep>,
         log: &mut MergeLog,
         i: usize,
         j: usize,
         distance: f64,
         kind: MergeKind| {
            let (i, j) = (i.min(j), i.max(j));
            let b = active.swap_remove(j);
            let a = active.swap_remove(i);
            let node_id = n + merges.len();
            let mut members = a.members;
            members.extend(&b.members);
            members.sort_unstable();
            merges.push(MergeStep {
                left: a.node_id,
                right: b.node_id,
                distance,
            });
            log.entries.push(MergeRecord {
                node_id,
                left: a.node_id,
                right: b.node_id,
                distance,
                kind,
            });
            active.push(ActiveCluster { node_id, members });
        };

    // Stage 1: must-link pairs, ascending by class-pair distance.
    let mut must: Vec<(f64, &(String, String))> = constraints
        .must_link
        .iter()
        .map(|p| (pair(label_index(&p.0), label_index(&p.1)), p))
        .collect();
    must.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(b.1)));
    for (_, (la, lb)) in must {
        let (a, b) = (label_index(la), label_index(lb));
        let i = active.iter().position(|c| c.members.contains(&a)).unwrap();
        let j = active.iter().position(|c| c.members.contains(&b)).unwrap();
        if i == j {
            continue;
        }
        let distance = linkage_distance(&active[i].members, &active[j].members);
        let union: Vec<usize> = active[i]
            .members
            .iter()
            .chain(&active[j].members)
            .copied()
            .collect();
        if let Some((x, y)) = violates(&union) {
            let msg = format!(
                "must-link merge of ({la}, {lb}) joins cannot-link pair ({}, {})",
                labels[x], labels[y]
            );
            if !config.relax_constraints_when_stuck {
                return Err(Error::ConstraintDeadlock(msg));
            }
            log.warnings.push(format!("relaxed constraints: {msg}"));
        }
        perform_merge(&mut active, &mut merges, &mut log, i, j, distance, MergeKind::MustLink);
    }

    // Stage 2: repeated minimum-distance merges respecting cannot-link.
    while active.len() > 1 {
        let mut best_legal: Option<(f64, (String, String), usize, usize)> = None;
        let mut best_any: Option<(f64, (String, String), usize, usize)> = None;
        for i in 0..active.len() {
            for j in (i + 1)..active.len() {
                let d = linkage_distance(&active[i].members, &active[j].members);
                let rep_i = labels[active[i].members[0]].clone();
                let rep_j = labels[active[j].members[0]].clone();
                let key = if rep_i < rep_j {
                    (rep_i, rep_j)
                } else {
                    (rep_j, rep_i)
                };
                let candidate = (d, key, i, j);
                let better = |cur: &Option<(f64, (String, String), usize, usize)>| {
                    match cur {
                        None => true,
                        Some((bd, bkey, _, _)) => {
                            d < *bd || (d == *bd && candidate.1 < *bkey)
                        }
                    }
                };
                let union: Vec<usize> = active[i]
                    .members
                    .iter()
                    .chain(&active[j].members)
                    .copied()
                    .collect();
                if violates(&union).is_none() && better(&best_legal) {
                    best_legal = Some(candidate.clone());
                }
                if better(&best_any) {
                    best_any = Some(candidate);
                }
            }
        }
        match best_legal {
            Some((d, _, i, j)) => {
                perform_merge(&mut active, &mut merges, &mut log, i, j, d, MergeKind::MinDistance);
            }
            None => {
                let (d, _, i, j) = best_any.expect("at least one pair exists");
                if !config.relax_constraints_when_stuck {
                    return Err(Error::ConstraintDeadlock(format!(
                        "no merge without a cannot-link violation remains among {} clusters",
                        active.len()
                    )));
                }
                let union: Vec<usize> = active[i]
                    .members
                    .iter()
                    .chain(&active[j].members)
                    .copied()
                    .collect();
                let (x, y) = violates(&union).expect("only violating merges remain");
                log.warnings.push(format!(
                    "relaxed constraints: merged clusters containing cannot-link pair ({}, {})",
                    labels[x], labels[y]
                ));
                perform_merge(&mut active, &mut merges, &mut log, i, j, d, MergeKind::Relaxed);
            }
        }
    }

    let hierarchy = Hierarchy::from_merge_sequence(&labels, &merges)?;
    Ok((hierarchy, log))
}

/// Row-parallel upper-triangle distance matrix between class centroids,
/// stored densely (row-major, only i <= j cells meaningful).
fn pairwise_matrix(ordered: &[&ClassEmbedding], config: &ClusteringConfig) -> Result<Vec<f64>> {
    let n = ordered.len();
    let indices: Vec<usize> = (0..n).collect();
    let rows = maybe_par_try_map(&indices, |&i| {
        let mut row = vec![0.0; n];
        for j in (i + 1)..n {
            row[j] = metric_distance(
                &ordered[i].centroid,
                &ordered[j].centroid,
                config.distance_metric,
            )?;
        }
        Ok(row)
    })?;
    Ok(rows.into_iter().flatten().collect())
}
