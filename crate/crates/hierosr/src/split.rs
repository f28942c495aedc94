//! The open-set split: reserve whole classes as unseen and hold out a seeded
//! per-class fraction of the remaining known-class samples for testing.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Which classes to reserve as unseen: an explicit set, or a seeded random
/// choice of `Count(k)` classes.
#[derive(Clone, Debug, PartialEq)]
pub enum UnseenSpec {
    Explicit(BTreeSet<String>),
    Count(usize),
}

/// Split into a training set (known classes only) and a test set (all
/// unseen-class samples plus a held-out fraction of each known class).
///
/// Identical inputs and seed produce identical splits; train and test sample
/// ids are disjoint.
pub fn open_set_split(
    dataset: &Dataset,
    unseen: &UnseenSpec,
    test_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid_argument(format!(
            "test_fraction must be in [0, 1), got {test_fraction}"
        )));
    }
    let unseen_classes: BTreeSet<String> = match unseen {
        UnseenSpec::Explicit(classes) => {
            for class in classes {
                if !dataset.classes().contains(class) {
                    return Err(Error::invalid_argument(format!(
                        "unknown class {class} in unseen set"
                    )));
                }
            }
            classes.clone()
        }
        UnseenSpec::Count(k) => {
            if *k > dataset.classes().len() {
                return Err(Error::invalid_argument(format!(
                    "cannot reserve {k} of {} classes",
                    dataset.classes().len()
                )));
            }
            let mut all: Vec<&String> = dataset.classes().iter().collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            all.shuffle(&mut rng);
            all[..*k].iter().map(|s| s.to_string()).collect()
        }
    };
    let known_count = dataset.classes().len() - unseen_classes.len();
    if known_count < 2 {
        return Err(Error::invalid_argument(format!(
            "unseen set leaves {known_count} known classes; need >= 2"
        )));
    }

    // Held-out known samples, drawn class by class from one seeded stream.
    let mut holdout_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut held_out: BTreeSet<&str> = BTreeSet::new();
    for (class, samples) in dataset.by_class() {
        if unseen_classes.contains(class) {
            continue;
        }
        let take = ((test_fraction * samples.len() as f64).floor() as usize)
            .min(samples.len() - 1);
        let mut ids: Vec<&str> = samples.iter().map(|s| s.sample_id.as_str()).collect();
        ids.shuffle(&mut holdout_rng);
        held_out.extend(ids.into_iter().take(take));
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for sample in dataset.samples() {
        if unseen_classes.contains(&sample.label) || held_out.contains(sample.sample_id.as_str())
        {
            test.push(sample.clone());
        } else {
            train.push(sample.clone());
        }
    }
    Ok((
        Dataset::new(train, dataset.dimension())?,
        Dataset::new(test, dataset.dimension())?,
    ))
}
