//! Labeled samples and datasets of embedding vectors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingVector;
use crate::error::{Error, Result};

/// One embedding with its class label and a dataset-unique id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub sample_id: String,
    pub label: String,
    pub embedding: EmbeddingVector,
}

impl LabeledSample {
    pub fn new(
        sample_id: impl Into<String>,
        label: impl Into<String>,
        embedding: EmbeddingVector,
    ) -> Self {
        LabeledSample {
            sample_id: sample_id.into(),
            label: label.into(),
            embedding,
        }
    }
}

/// A collection of labeled samples sharing one embedding dimension.
///
/// The class set is derived from the labels actually present. Training sets
/// carry only known classes; test sets may mix known and unseen classes.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    dimension: usize,
    classes: BTreeSet<String>,
}

impl Dataset {
    pub fn new(samples: Vec<LabeledSample>, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid_argument("dimension must be >= 1"));
        }
        let mut seen = BTreeSet::new();
        let mut classes = BTreeSet::new();
        for s in &samples {
            if s.embedding.dim() != dimension {
                return Err(Error::invalid_argument(format!(
                    "sample {} has dimension {} (dataset dimension {dimension})",
                    s.sample_id,
                    s.embedding.dim()
                )));
            }
            if !seen.insert(s.sample_id.as_str()) {
                return Err(Error::invalid_argument(format!(
                    "duplicate sample_id {}",
                    s.sample_id
                )));
            }
            classes.insert(s.label.clone());
        }
        drop(seen);
        Ok(Dataset {
            samples,
            dimension,
            classes,
        })
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples grouped by class label, in label order.
    pub fn by_class(&self) -> BTreeMap<&str, Vec<&LabeledSample>> {
        let mut map: BTreeMap<&str, Vec<&LabeledSample>> = BTreeMap::new();
        for s in &self.samples {
            map.entry(s.label.as_str()).or_default().push(s);
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, label: &str, values: &[f64]) -> LabeledSample {
        LabeledSample::new(id, label, EmbeddingVector::new(values.to_vec()).unwrap())
    }

    #[test]
    fn derives_class_set_from_labels() {
        let ds = Dataset::new(
            vec![
                sample("s1", "a", &[0.0, 0.0]),
                sample("s2", "b", &[1.0, 0.0]),
                sample("s3", "a", &[0.5, 0.0]),
            ],
            2,
        )
        .unwrap();
        assert_eq!(
            ds.classes().iter().cloned().collect::<Vec<_>>(),
            vec!["a".to_string(), "b".to_string()]
        );
        assert_eq!(ds.by_class()["a"].len(), 2);
    }

    #[test]
    fn rejects_duplicate_ids_and_bad_dims() {
        assert!(Dataset::new(
            vec![sample("s1", "a", &[0.0, 0.0]), sample("s1", "b", &[1.0, 0.0])],
            2
        )
        .is_err());
        assert!(Dataset::new(vec![sample("s1", "a", &[0.0])], 2).is_err());
    }

    #[test]
    fn empty_dataset_is_allowed() {
        let ds = Dataset::new(vec![], 3).unwrap();
        assert!(ds.is_empty());
        assert!(ds.classes().is_empty());
    }
}
