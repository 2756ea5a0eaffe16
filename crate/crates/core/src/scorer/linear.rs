//! Logistic regression trained by full-batch gradient descent.
//!
//! Two classes use a single sigmoid output; three or more use a softmax
//! over one weight row per class. The loss is mean cross-entropy plus
//! `l2 / 2 * ||W||²` (bias unregularized).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::features::{check_training_data, neg_log, sigmoid, softmax, FeatureMatrix, SparseVec};
use super::LabelSchema;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub schema: LabelSchema,
    dim: usize,
    /// Row-major, one row per output (1 row for binary).
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LrConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 0.5,
            l2: 1e-4,
        }
    }
}

impl LinearModel {
    /// Zero-initialized model.
    pub fn zeros(schema: LabelSchema, dim: usize) -> Self {
        let outputs = Self::outputs_for(schema.len());
        Self {
            schema,
            dim,
            weights: vec![0.0; outputs * dim],
            bias: vec![0.0; outputs],
        }
    }

    fn outputs_for(n_classes: usize) -> usize {
        if n_classes == 2 {
            1
        } else {
            n_classes
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn outputs(&self) -> usize {
        self.bias.len()
    }

    fn logits(&self, x: &SparseVec) -> Vec<f64> {
        (0..self.outputs())
            .map(|k| self.bias[k] + x.dot(&self.weights[k * self.dim..(k + 1) * self.dim]))
            .collect()
    }

    fn proba_unchecked(&self, x: &SparseVec) -> Vec<f64> {
        let mut z = self.logits(x);
        if self.outputs() == 1 {
            let p = sigmoid(z[0]);
            vec![sigmoid(-z[0]), p]
        } else {
            softmax(&mut z);
            z
        }
    }

    pub fn predict_proba(&self, x: &SparseVec) -> Result<Vec<f64>> {
        if let Some(max) = x.max_index() {
            if max >= self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: max + 1,
                });
            }
        }
        Ok(self.proba_unchecked(x))
    }

    /// Flattened parameters: weights then bias.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.extend_from_slice(&self.bias);
        p
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let (w, b) = params.split_at(self.weights.len());
        self.weights.copy_from_slice(w);
        self.bias.copy_from_slice(b);
    }

    /// Loss and its gradient in [`params`](Self::params) layout.
    pub fn loss_and_gradient(&self, x: &FeatureMatrix, labels: &[usize], l2: f64) -> (f64, Vec<f64>) {
        let n = x.len() as f64;
        let k = self.outputs();
        let mut grad = vec![0.0; self.weights.len() + k];
        let mut loss = 0.0;
        for (row, &y) in x.rows().iter().zip(labels) {
            let p = self.proba_unchecked(row);
            loss += neg_log(p[y]);
            let delta: Vec<f64> = if k == 1 {
                vec![p[1] - if y == 1 { 1.0 } else { 0.0 }]
            } else {
                p.iter()
                    .enumerate()
                    .map(|(c, pc)| pc - if c == y { 1.0 } else { 0.0 })
                    .collect()
            };
            for (o, d) in delta.iter().enumerate() {
                let base = o * self.dim;
                for (i, v) in row.iter() {
                    grad[base + i] += d * v / n;
                }
                grad[self.weights.len() + o] += d / n;
            }
        }
        let mut reg = 0.0;
        for (g, w) in grad.iter_mut().zip(&self.weights) {
            *g += l2 * w;
            reg += w * w;
        }
        (loss / n + 0.5 * l2 * reg, grad)
    }
}

pub fn train_lr(x: &FeatureMatrix, labels: &[usize], schema: &LabelSchema, cfg: &LrConfig) -> Result<LinearModel> {
    check_training_data(x, labels, schema.len())?;
    let mut model = LinearModel::zeros(schema.clone(), x.dim());
    let mut params = model.params();
    for _ in 0..cfg.epochs {
        let (_, grad) = model.loss_and_gradient(x, labels, cfg.l2);
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
        model.set_params(&params);
    }
    Ok(model)
}
