//! Seeded synthetic embedding generation with a planted class hierarchy.
//!
//! Class means are placed by hierarchical diffusion over a random balanced
//! binary tree: each internal node draws a Gaussian direction and displaces
//! its two children symmetrically along it, with the displacement magnitude
//! shrinking geometrically per level. Nearby classes in the planted tree are
//! therefore nearby in embedding space and the topology is recoverable by
//! agglomerative clustering as long as the sample noise stays small relative
//! to the deepest displacement.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, LabeledSample};
use crate::embedding::EmbeddingVector;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, MergeStep, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub known_classes: usize,
    pub unseen_classes: usize,
    pub dims: usize,
    pub samples_per_class: usize,
    /// Per-coordinate standard deviation of sample noise around class means.
    pub noise_scale: f64,
    /// Magnitude scale of the level-0 diffusion step.
    pub step_scale: f64,
    /// Geometric per-level shrink factor of the diffusion step, in (0, 1].
    pub decay: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(known_classes: usize, unseen_classes: usize, dims: usize) -> Self {
        SynthConfig {
            known_classes,
            unseen_classes,
            dims,
            samples_per_class: 50,
            noise_scale: 0.1,
            step_scale: 1.0,
            decay: 0.55,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.known_classes < 2 {
            return Err(Error::invalid_argument("need >= 2 known classes"));
        }
        if self.unseen_classes < 1 {
            return Err(Error::invalid_argument("need >= 1 unseen class"));
        }
        if self.dims < 2 {
            return Err(Error::invalid_argument("need >= 2 dimensions"));
        }
        if self.samples_per_class < 1 {
            return Err(Error::invalid_argument("need >= 1 sample per class"));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::invalid_argument("noise_scale must be finite and >= 0"));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::invalid_argument("step_scale must be positive"));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::invalid_argument("decay must be in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SynthOutput {
    /// All samples of all known and unseen classes.
    pub dataset: Dataset,
    /// The planted hierarchy over every generated class; merge distances are
    /// the sibling separations used at each node.
    pub planted: Hierarchy,
    pub unseen_classes: BTreeSet<String>,
}

enum Planted {
    Leaf(usize),
    Internal(Box<Planted>, Box<Planted>),
}

fn balanced_tree(leaves: &[usize]) -> Planted {
    if leaves.len() == 1 {
        Planted::Leaf(leaves[0])
    } else {
        let mid = leaves.len() / 2;
        Planted::Internal(
            Box::new(balanced_tree(&leaves[..mid])),
            Box::new(balanced_tree(&leaves[mid..])),
        )
    }
}

/// Generate a fully deterministic synthetic open-set dataset.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let total = config.known_classes + config.unseen_classes;
    let width = (total - 1).to_string().len().max(2);
    let labels: Vec<String> = (0..total)
        .map(|i| format!("class_{i:0width$}"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Random leaf arrangement over a balanced shape.
    let mut arrangement: Vec<usize> = (0..total).collect();
    arrangement.shuffle(&mut rng);
    let tree = balanced_tree(&arrangement);

    // Hierarchical diffusion of class means, mirrored around each parent.
    let mut means: Vec<Vec<f64>> = vec![Vec::new(); total];
    let mut stack: Vec<(&Planted, Vec<f64>, usize)> =
        vec![(&tree, vec![0.0; config.dims], 0)];
    let mut separations: Vec<(usize, f64)> = Vec::new(); // by traversal, unused order
    while let Some((node, mean, level)) = stack.pop() {
        match node {
            Planted::Leaf(class) => means[*class] = mean,
            Planted::Internal(left, right) => {
                let magnitude = config.step_scale
                    * config.decay.powi(level as i32)
                    * (config.dims as f64).sqrt();
                let mut direction: Vec<f64> =
                    (0..config.dims).map(|_| rng.sample(StandardNormal)).collect();
                let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                for x in direction.iter_mut() {
                    *x *= magnitude / norm;
                }
                let left_mean: Vec<f64> =
                    mean.iter().zip(&direction).map(|(m, v)| m + v).collect();
                let right_mean: Vec<f64> =
                    mean.iter().zip(&direction).map(|(m, v)| m - v).collect();
                separations.push((level, 2.0 * magnitude));
                // Push right first so the left subtree is processed first.
                stack.push((right, right_mean, level + 1));
                stack.push((left, left_mean, level + 1));
            }
        }
    }

    let planted = planted_hierarchy(&tree, &labels, config)?;

    // Unseen classes are a random subset of the planted leaves.
    let mut pick: Vec<usize> = (0..total).collect();
    pick.shuffle(&mut rng);
    let unseen_classes: BTreeSet<String> = pick[..config.unseen_classes]
        .iter()
        .map(|&i| labels[i].clone())
        .collect();

    let mut samples = Vec::with_capacity(total * config.samples_per_class);
    for (class, label) in labels.iter().enumerate() {
        for j in 0..config.samples_per_class {
            let values: Vec<f64> = means[class]
                .iter()
                .map(|m| m + config.noise_scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            samples.push(LabeledSample::new(
                format!("{label}_s{j:03}"),
                label,
                EmbeddingVector::new(values)?,
            ));
        }
    }
    let dataset = Dataset::new(samples, config.dims)?;

    Ok(SynthOutput {
        dataset,
        planted,
        unseen_classes,
    })
}

/// Rebuild the planted topology as a [`Hierarchy`], with each internal
/// node's merge distance set to the sibling separation at its level.
fn planted_hierarchy(tree: &Planted, labels: &[String], config: &SynthConfig) -> Result<Hierarchy> {
    fn collect(
        node: &Planted,
        level: usize,
        next_id: &mut NodeId,
        merges: &mut Vec<MergeStep>,
        config: &SynthConfig,
        dims: f64,
    ) -> NodeId {
        match node {
            Planted::Leaf(class) => *class,
            Planted::Internal(l, r) => {
                let left = collect(l, level + 1, next_id, merges, config, dims);
                let right = collect(r, level + 1, next_id, merges, config, dims);
                let id = *next_id;
                *next_id += 1;
                let separation =
                    2.0 * config.step_scale * config.decay.powi(level as i32) * dims.sqrt();
                merges.push(MergeStep {
                    left,
                    right,
                    distance: separation,
                });
                id
            }
        }
    }
    let mut merges = Vec::new();
    let mut next_id = labels.len();
    collect(
        tree,
        0,
        &mut next_id,
        &mut merges,
        config,
        config.dims as f64,
    );
    Hierarchy::from_merge_sequence(labels, &merges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_reproduces_everything() {
        let config = SynthConfig::new(4, 2, 8);
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.planted, b.planted);
        assert_eq!(a.unseen_classes, b.unseen_classes);

        let other = generate(&SynthConfig { seed: 1, ..config }).unwrap();
        assert_ne!(a.dataset, other.dataset);
    }

    #[test]
    fn zero_noise_puts_samples_on_their_class_mean() {
        let config = SynthConfig {
            noise_scale: 0.0,
            samples_per_class: 3,
            ..SynthConfig::new(3, 1, 4)
        };
        let out = generate(&config).unwrap();
        for (_, samples) in out.dataset.by_class() {
            for pair in samples.windows(2) {
                assert_eq!(pair[0].embedding, pair[1].embedding);
            }
        }
    }

    #[test]
    fn planted_tree_covers_all_classes() {
        let config = SynthConfig::new(8, 2, 16);
        let out = generate(&config).unwrap();
        assert!(out.planted.validate().is_empty());
        assert_eq!(out.planted.classes().count(), 10);
        assert_eq!(out.unseen_classes.len(), 2);
        assert_eq!(out.dataset.classes().len(), 10);
        for class in &out.unseen_classes {
            assert!(out.planted.leaf_for_class(class).is_some());
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(generate(&SynthConfig::new(1, 1, 4)).is_err());
        assert!(generate(&SynthConfig::new(2, 0, 4)).is_err());
        assert!(generate(&SynthConfig::new(2, 1, 1)).is_err());
        let mut config = SynthConfig::new(2, 1, 4);
        config.noise_scale = f64::NAN;
        assert!(generate(&config).is_err());
    }
}
