//! Shared helpers for the integration suites: random instance generators and
//! the independent oracles the implementation is checked against.

use std::collections::{BTreeMap, VecDeque};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use hierosr::{
    ClassEmbedding, ClusteringConfig, EmbeddingVector, Hierarchy, Linkage, MergeStep, NodeId,
};

/// Random full binary hierarchy over `n` classes (node count `2n-1`).
pub fn random_hierarchy(n: usize, seed: u64) -> Hierarchy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..n).map(|i| format!("c{i:02}")).collect();
    let mut active: Vec<NodeId> = (0..n).collect();
    let mut merges = Vec::new();
    let mut next = n;
    let mut distance = 0.0;
    while active.len() > 1 {
        let i = rng.random_range(0..active.len());
        let a = active.swap_remove(i);
        let j = rng.random_range(0..active.len());
        let b = active.swap_remove(j);
        distance += rng.random_range(0.1..1.0);
        merges.push(MergeStep { left: a, right: b, distance });
        active.push(next);
        next += 1;
    }
    Hierarchy::from_merge_sequence(&labels, &merges).unwrap()
}

/// Random assignment distribution over a nonempty node subset.
pub fn random_distribution(node_count: usize, rng: &mut ChaCha8Rng) -> BTreeMap<NodeId, f64> {
    let support = rng.random_range(1..=node_count);
    let mut nodes: Vec<NodeId> = (0..node_count).collect();
    nodes.shuffle(rng);
    let weights: Vec<f64> = (0..support).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    nodes[..support]
        .iter()
        .zip(weights)
        .map(|(&n, w)| (n, w / total))
        .collect()
}

/// Independent BFS distances, built from scratch on an adjacency list rather
/// than the Hierarchy's own traversal helpers.
pub fn bfs_distances(hierarchy: &Hierarchy, from: NodeId) -> Vec<usize> {
    let n = hierarchy.nodes().count();
    let mut adjacency = vec![Vec::new(); n];
    for node in hierarchy.nodes() {
        if let Some(parent) = node.parent {
            adjacency[node.id].push(parent);
            adjacency[parent].push(node.id);
        }
    }
    let mut dist = vec![usize::MAX; n];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Brute-force CC: the raw equation evaluated over BFS distances.
pub fn cc_oracle(
    hierarchy: &Hierarchy,
    t: NodeId,
    proportions: &BTreeMap<NodeId, f64>,
) -> f64 {
    let dist = bfs_distances(hierarchy, t);
    let d_max = *dist.iter().max().unwrap();
    if d_max == 0 {
        return 1.0;
    }
    let weighted: f64 = proportions
        .iter()
        .map(|(&node, &p)| dist[node] as f64 / d_max as f64 * p)
        .sum();
    1.0 - weighted
}

/// Exhaustive CCC: scan every node with the oracle CC, ties to lower id.
pub fn ccc_oracle(
    hierarchy: &Hierarchy,
    proportions: &BTreeMap<NodeId, f64>,
) -> (NodeId, f64) {
    let mut best: Option<(NodeId, f64)> = None;
    for node in hierarchy.nodes() {
        let cc = cc_oracle(hierarchy, node.id, proportions);
        match best {
            Some((_, b)) if cc <= b => {}
            _ => best = Some((node.id, cc)),
        }
    }
    best.unwrap()
}

/// Naive O(n^3) agglomerative oracle: recompute every pairwise cluster
/// distance from the raw centroids at every step, merge the global minimum,
/// ties broken by the lexicographically smallest representative-label pair.
/// Returns (left_node_id, right_node_id, distance) per merge, with the same
/// node numbering convention as `build_hierarchy`.
pub fn naive_merge_sequence(
    class_embeddings: &[ClassEmbedding],
    config: &ClusteringConfig,
) -> Vec<(NodeId, NodeId, f64)> {
    let mut ordered: Vec<&ClassEmbedding> = class_embeddings.iter().collect();
    ordered.sort_by(|a, b| a.class_label.cmp(&b.class_label));
    let n = ordered.len();

    struct Cluster {
        node_id: NodeId,
        members: Vec<usize>,
    }
    let metric = |i: usize, j: usize| -> f64 {
        match config.distance_metric {
            hierosr::DistanceMetric::Euclidean => ordered[i]
                .centroid
                .euclidean_distance(&ordered[j].centroid)
                .unwrap(),
            hierosr::DistanceMetric::Cosine => ordered[i]
                .centroid
                .cosine_distance(&ordered[j].centroid)
                .unwrap(),
        }
    };
    let linkage = |a: &[usize], b: &[usize]| -> f64 {
        let mut values = Vec::new();
        for &i in a {
            for &j in b {
                values.push(metric(i, j));
            }
        }
        match config.linkage {
            Linkage::Single => values.iter().copied().fold(f64::INFINITY, f64::min),
            Linkage::Complete => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Linkage::Average => values.iter().sum::<f64>() / values.len() as f64,
        }
    };

    let mut active: Vec<Cluster> = (0..n)
        .map(|i| Cluster { node_id: i, members: vec![i] })
        .collect();
    let mut out = Vec::new();
    let mut next_id = n;
    while active.len() > 1 {
        let mut best: Option<(f64, (String, String), usize, usize)> = None;
        for i in 0..active.len() {
            for j in (i + 1)..active.len() {
                let d = linkage(&active[i].members, &active[j].members);
                let rep_i = ordered[active[i].members[0]].class_label.clone();
                let rep_j = ordered[active[j].members[0]].class_label.clone();
                let key = if rep_i < rep_j { (rep_i, rep_j) } else { (rep_j, rep_i) };
                let better = match &best {
                    None => true,
                    Some((bd, bkey, _, _)) => d < *bd || (d == *bd && key < *bkey),
                };
                if better {
                    best = Some((d, key, i, j));
                }
            }
        }
        let (d, _, i, j) = best.unwrap();
        let b = active.swap_remove(j);
        let a = active.swap_remove(i);
        out.push((a.node_id, b.node_id, d));
        let mut members = a.members;
        members.extend(b.members);
        members.sort_unstable();
        active.push(Cluster { node_id: next_id, members });
        next_id += 1;
    }
    out
}

/// Brute-force Mann-Whitney AUC by explicit pair counting.
pub fn auc_oracle(scores: &[(f64, bool)]) -> f64 {
    let known: Vec<f64> = scores.iter().filter(|(_, k)| *k).map(|(s, _)| *s).collect();
    let unknown: Vec<f64> = scores.iter().filter(|(_, k)| !*k).map(|(s, _)| *s).collect();
    let mut favorable = 0.0;
    for &k in &known {
        for &u in &unknown {
            if k > u {
                favorable += 1.0;
            } else if k == u {
                favorable += 0.5;
            }
        }
    }
    favorable / (known.len() as f64 * unknown.len() as f64)
}

/// Random class embeddings for clustering-oracle instances. Cosine instances
/// are offset into the positive orthant to keep vectors nonzero.
pub fn random_class_embeddings(
    classes: usize,
    dims: usize,
    positive: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<ClassEmbedding> {
    (0..classes)
        .map(|i| {
            let values: Vec<f64> = (0..dims)
                .map(|_| {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    if positive {
                        v + 2.0
                    } else {
                        v
                    }
                })
                .collect();
            ClassEmbedding::new(
                format!("k{i:02}"),
                EmbeddingVector::new(values).unwrap(),
                rng.random_range(1..5),
            )
            .unwrap()
        })
        .collect()
}
