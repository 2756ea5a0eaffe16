//! One-hidden-layer perceptron with rectifier activation and softmax output.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

use super::features::{check_training_data, neg_log, softmax, FeatureMatrix, SparseVec};
use super::LabelSchema;

pub const DEFAULT_HIDDEN_DIM: usize = 256;

/// Parameters. The input layer is stored input-major (`input × hidden`) so a
/// sparse row touches contiguous slices; it is the transpose of the usual
/// `hidden × input` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub schema: LabelSchema,
    input_dim: usize,
    hidden_dim: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// `classes × hidden`, row-major.
    w2: Vec<f64>,
    b2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpConfig {
    pub hidden_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_dim: DEFAULT_HIDDEN_DIM,
            epochs: 300,
            learning_rate: 0.5,
            seed: 0,
        }
    }
}

struct Forward {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    proba: Vec<f64>,
}

impl MlpModel {
    /// Uniform `[-r, r]` initialization with `r = sqrt(6 / (fan_in + fan_out))`;
    /// biases start at zero.
    pub fn init(schema: LabelSchema, input_dim: usize, hidden_dim: usize, seed: u64) -> Result<Self> {
        let classes = schema.len();
        if !(2..=3).contains(&classes) {
            return Err(Error::invalid(format!("MLP supports 2 or 3 classes, got {classes}")));
        }
        if hidden_dim == 0 || input_dim == 0 {
            return Err(Error::invalid("MLP dimensions must be positive"));
        }
        let mut rng = numeric::rng(seed);
        let r1 = (6.0 / (input_dim + hidden_dim) as f64).sqrt();
        let r2 = (6.0 / (hidden_dim + classes) as f64).sqrt();
        let w1 = (0..input_dim * hidden_dim).map(|_| rng.random_range(-r1..=r1)).collect();
        let w2 = (0..classes * hidden_dim).map(|_| rng.random_range(-r2..=r2)).collect();
        Ok(Self {
            schema,
            input_dim,
            hidden_dim,
            w1,
            b1: vec![0.0; hidden_dim],
            w2,
            b2: vec![0.0; classes],
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    fn classes(&self) -> usize {
        self.b2.len()
    }

    fn forward(&self, x: &SparseVec) -> Forward {
        let h = self.hidden_dim;
        let mut pre = self.b1.clone();
        for (i, v) in x.iter() {
            let row = &self.w1[i * h..(i + 1) * h];
            for (p, w) in pre.iter_mut().zip(row) {
                *p += v * w;
            }
        }
        let hidden: Vec<f64> = pre.iter().map(|z| z.max(0.0)).collect();
        let mut proba: Vec<f64> = (0..self.classes())
            .map(|c| {
                self.b2[c]
                    + self.w2[c * h..(c + 1) * h]
                        .iter()
                        .zip(&hidden)
                        .map(|(w, a)| w * a)
                        .sum::<f64>()
            })
            .collect();
        softmax(&mut proba);
        Forward { pre, hidden, proba }
    }

    pub fn predict_proba(&self, x: &SparseVec) -> Result<Vec<f64>> {
        if let Some(max) = x.max_index() {
            if max >= self.input_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.input_dim,
                    actual: max + 1,
                });
            }
        }
        Ok(self.forward(x).proba)
    }

    /// Flattened parameters: w1, b1, w2, b2.
    pub fn params(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let (w1, rest) = params.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.b1.len());
        let (w2, b2) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2.copy_from_slice(b2);
    }

    /// Mean cross-entropy and its gradient in [`params`](Self::params) layout.
    pub fn loss_and_gradient(&self, x: &FeatureMatrix, labels: &[usize]) -> (f64, Vec<f64>) {
        let h = self.hidden_dim;
        let n = x.len() as f64;
        let (o_b1, o_w2) = (self.w1.len(), self.w1.len() + h);
        let o_b2 = o_w2 + self.w2.len();
        let mut grad = vec![0.0; o_b2 + self.classes()];
        let mut loss = 0.0;
        let mut dh = vec![0.0; h];
        for (row, &y) in x.rows().iter().zip(labels) {
            let f = self.forward(row);
            loss += neg_log(f.proba[y]);
            dh.iter_mut().for_each(|d| *d = 0.0);
            for c in 0..self.classes() {
                let d = (f.proba[c] - if c == y { 1.0 } else { 0.0 }) / n;
                grad[o_b2 + c] += d;
                let w2row = &self.w2[c * h..(c + 1) * h];
                let g2row = &mut grad[o_w2 + c * h..o_w2 + (c + 1) * h];
                for j in 0..h {
                    g2row[j] += d * f.hidden[j];
                    dh[j] += d * w2row[j];
                }
            }
            for j in 0..h {
                if f.pre[j] <= 0.0 {
                    dh[j] = 0.0;
                }
                grad[o_b1 + j] += dh[j];
            }
            for (i, v) in row.iter() {
                let g1row = &mut grad[i * h..(i + 1) * h];
                for (g, d) in g1row.iter_mut().zip(&dh) {
                    *g += v * d;
                }
            }
        }
        (loss / n, grad)
    }
}

pub fn train_mlp(x: &FeatureMatrix, labels: &[usize], schema: &LabelSchema, cfg: &MlpConfig) -> Result<MlpModel> {
    check_training_data(x, labels, schema.len())?;
    let mut model = MlpModel::init(schema.clone(), x.dim(), cfg.hidden_dim, cfg.seed)?;
    let mut params = model.params();
    for _ in 0..cfg.epochs {
        let (_, grad) = model.loss_and_gradient(x, labels);
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
        model.set_params(&params);
    }
    Ok(model)
}
