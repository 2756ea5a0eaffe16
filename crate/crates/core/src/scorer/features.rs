use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse feature row with strictly increasing indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        Self { indices, values }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }
}

/// Rows of a fixed width.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    rows: Vec<SparseVec>,
}

impl FeatureMatrix {
    pub fn new(dim: usize, rows: Vec<SparseVec>) -> Result<Self> {
        for r in &rows {
            if r.indices.len() != r.values.len() {
                return Err(Error::invalid("sparse row has mismatched index/value lengths"));
            }
            if let Some(max) = r.max_index() {
                if max >= dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: max + 1,
                    });
                }
            }
        }
        Ok(Self { dim, rows })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        Self::new(dim, rows.iter().map(|r| SparseVec::from_dense(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }
}

pub(crate) fn check_training_data(x: &FeatureMatrix, labels: &[usize], n_classes: usize) -> Result<()> {
    if x.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature rows but {} labels",
            x.len(),
            labels.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::invalid("training needs at least 2 examples"));
    }
    if let Some(bad) = labels.iter().find(|l| **l >= n_classes) {
        return Err(Error::invalid(format!("label index {bad} outside {n_classes} classes")));
    }
    let first = labels[0];
    if labels.iter().all(|l| *l == first) {
        return Err(Error::invalid("training labels contain a single class"));
    }
    Ok(())
}

/// Numerically stable in-place softmax.
pub(crate) fn softmax(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for z in logits.iter_mut() {
        *z = (*z - max).exp();
        sum += *z;
    }
    for z in logits.iter_mut() {
        *z /= sum;
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-ln(p)` clamped away from infinity.
pub(crate) fn neg_log(p: f64) -> f64 {
    -(p.max(f64::MIN_POSITIVE)).ln()
}
