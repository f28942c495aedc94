//! Embedding vectors and the distance functions defined on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the d-dimensional feature space produced by an upstream encoder.
///
/// All entries are finite; the dimension is fixed at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid_argument("embedding must have dimension >= 1"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid_argument(format!(
                "embedding entry {i} is not finite: {}",
                values[i]
            )));
        }
        Ok(EmbeddingVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn euclidean_distance(&self, other: &EmbeddingVector) -> Result<f64> {
        check_dims(self, other)?;
        Ok(sq_dist(&self.0, &other.0).sqrt())
    }

    /// Cosine distance `1 - cos(a, b)`. Undefined for zero vectors.
    pub fn cosine_distance(&self, other: &EmbeddingVector) -> Result<f64> {
        check_dims(self, other)?;
        let na = norm(&self.0);
        let nb = norm(&other.0);
        if na == 0.0 || nb == 0.0 {
            return Err(Error::invalid_argument(
                "cosine distance is undefined for zero vectors",
            ));
        }
        let dot: f64 = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        Ok(1.0 - dot / (na * nb))
    }

    /// Arithmetic mean of a nonempty set of vectors of equal dimension.
    pub fn mean<'a, I>(vectors: I) -> Result<EmbeddingVector>
    where
        I: IntoIterator<Item = &'a EmbeddingVector>,
    {
        let mut iter = vectors.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::invalid_argument("mean of zero vectors"))?;
        let mut acc = first.0.clone();
        let mut count = 1usize;
        for v in iter {
            if v.dim() != acc.len() {
                return Err(Error::invalid_argument(format!(
                    "dimension mismatch: {} vs {}",
                    v.dim(),
                    acc.len()
                )));
            }
            for (a, x) in acc.iter_mut().zip(&v.0) {
                *a += x;
            }
            count += 1;
        }
        let n = count as f64;
        for a in acc.iter_mut() {
            *a /= n;
        }
        EmbeddingVector::new(acc)
    }
}

impl TryFrom<Vec<f64>> for EmbeddingVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        EmbeddingVector::new(values)
    }
}

impl From<EmbeddingVector> for Vec<f64> {
    fn from(v: EmbeddingVector) -> Vec<f64> {
        v.0
    }
}

fn check_dims(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::invalid_argument(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(values: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(EmbeddingVector::new(vec![0.0, f64::NAN]).is_err());
        assert!(EmbeddingVector::new(vec![f64::INFINITY]).is_err());
        assert!(EmbeddingVector::new(vec![]).is_err());
    }

    #[test]
    fn euclidean_basics() {
        assert_eq!(ev(&[0.0, 0.0]).euclidean_distance(&ev(&[0.0, 1.0])).unwrap(), 1.0);
        assert_eq!(ev(&[1.0, 2.0]).euclidean_distance(&ev(&[1.0, 2.0])).unwrap(), 0.0);
        assert!(ev(&[1.0]).euclidean_distance(&ev(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn cosine_orthogonal_is_one() {
        let d = ev(&[1.0, 0.0]).cosine_distance(&ev(&[0.0, 1.0])).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!(ev(&[0.0, 0.0]).cosine_distance(&ev(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn mean_of_two_points_is_midpoint() {
        let m = EmbeddingVector::mean([&ev(&[0.0, 0.0]), &ev(&[2.0, 0.0])]).unwrap();
        assert_eq!(m, ev(&[1.0, 0.0]));
    }
}
