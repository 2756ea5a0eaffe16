//! Stance and ideology scorers.
//!
//! Every scorer maps text to a signed score in `[-1, 1]`. The built-in
//! scorer pairs a tf-idf featurizer with a logistic-regression or MLP head;
//! [`RemoteScorer`] forwards to an HTTP service speaking the `/v1/score`
//! protocol.

mod features;
mod linear;
mod mlp;
mod remote;
mod tfidf;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use features::{FeatureMatrix, SparseVec};
pub use linear::{train_lr, LinearModel, LrConfig};
pub use mlp::{train_mlp, MlpConfig, MlpModel, DEFAULT_HIDDEN_DIM};
pub use remote::{RemoteConfig, RemoteScorer, ScoreMode, ScoreRequest, ScoreResponse};
pub use tfidf::{fit_tfidf, tokenize, TfidfVocab, DEFAULT_MAX_VOCAB};

pub trait StanceScorer: Send + Sync {
    /// Stance of `text` toward `target`, in `[-1, 1]`.
    fn score_stance(&self, target: &str, text: &str) -> Result<f64>;

    /// Ideology of `text`, in `[-1, 1]`; positive means the scorer's
    /// positive (conservative) class.
    fn score_ideology(&self, text: &str) -> Result<f64>;

    fn score_stance_batch(&self, target: &str, texts: &[&str]) -> Result<Vec<f64>> {
        texts.par_iter().map(|t| self.score_stance(target, t)).collect()
    }

    fn score_ideology_batch(&self, texts: &[&str]) -> Result<Vec<f64>> {
        texts.par_iter().map(|t| self.score_ideology(t)).collect()
    }
}

/// Ordered class names. For two classes, index 0 is the negative class and
/// index 1 the positive class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelSchema(Vec<String>);

impl LabelSchema {
    pub fn new(labels: Vec<String>) -> Self {
        Self(labels)
    }

    pub fn binary(negative: &str, positive: &str) -> Self {
        Self(vec![negative.into(), positive.into()])
    }

    /// `con` / `pro`.
    pub fn stance_binary() -> Self {
        Self::binary("con", "pro")
    }

    /// `con` / `pro` / `neutral`.
    pub fn three_class() -> Self {
        Self(vec!["con".into(), "pro".into(), "neutral".into()])
    }

    /// `liberal` / `conservative`.
    pub fn ideology() -> Self {
        Self::binary("liberal", "conservative")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `+p` when the positive class is predicted, `-p` otherwise, where `p`
    /// is the predicted class probability.
    #[default]
    SignedPredicted,
    /// `p_pos - p_neg`.
    Expectation,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "signed_predicted" => Ok(Self::SignedPredicted),
            "expectation" => Ok(Self::Expectation),
            other => Err(Error::invalid(format!("unknown convention {other:?}"))),
        }
    }
}

/// Collapses a binary probability vector `[p_neg, p_pos]` into `[-1, 1]`.
/// Ties predict the negative class.
pub fn signed_score(proba: &[f64], convention: Convention) -> Result<f64> {
    let [neg, pos] = proba else {
        return Err(Error::invalid(format!(
            "signed score needs a binary probability vector, got {} classes",
            proba.len()
        )));
    };
    let s = match convention {
        Convention::SignedPredicted if pos > neg => *pos,
        Convention::SignedPredicted => -neg,
        Convention::Expectation => pos - neg,
    };
    Ok(s.clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    Linear(LinearModel),
    Mlp(MlpModel),
}

impl Classifier {
    pub fn schema(&self) -> &LabelSchema {
        match self {
            Classifier::Linear(m) => &m.schema,
            Classifier::Mlp(m) => &m.schema,
        }
    }

    pub fn predict_proba(&self, x: &SparseVec) -> Result<Vec<f64>> {
        match self {
            Classifier::Linear(m) => m.predict_proba(x),
            Classifier::Mlp(m) => m.predict_proba(x),
        }
    }

    /// Dense-input variant; the vector length must equal the model width.
    pub fn predict_proba_dense(&self, x: &[f64]) -> Result<Vec<f64>> {
        let dim = match self {
            Classifier::Linear(m) => m.dim(),
            Classifier::Mlp(m) => m.input_dim(),
        };
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        self.predict_proba(&SparseVec::from_dense(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Stance,
    Ideology,
}

pub const MODEL_MAGIC: &str = "SCSL1";

/// Persisted vocabulary plus classifier head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerModel {
    pub task: Task,
    pub vocab: TfidfVocab,
    pub classifier: Classifier,
}

impl ScorerModel {
    pub fn new(task: Task, vocab: TfidfVocab, classifier: Classifier) -> Result<Self> {
        let dim = match &classifier {
            Classifier::Linear(m) => m.dim(),
            Classifier::Mlp(m) => m.input_dim(),
        };
        if dim != vocab.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: vocab.feature_dim(),
                actual: dim,
            });
        }
        Ok(Self {
            task,
            vocab,
            classifier,
        })
    }

    pub fn proba(&self, target: &str, text: &str) -> Result<Vec<f64>> {
        self.classifier
            .predict_proba(&self.vocab.featurize_sparse(target, text))
    }

    /// Most probable label (first on ties).
    pub fn predict_label(&self, target: &str, text: &str) -> Result<&str> {
        let p = self.proba(target, text)?;
        let best = p
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v > p[best] { i } else { best });
        Ok(&self.classifier.schema().labels()[best])
    }

    /// `SCSL1` header line followed by a JSON body.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let body = serde_json::json!({
            "format_version": 1,
            "model": self,
        });
        let mut out = format!("{MODEL_MAGIC}\n").into_bytes();
        serde_json::to_writer(&mut out, &body).map_err(|e| Error::Model(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|_| Error::Model("not UTF-8".into()))?;
        let (magic, body) = text.split_once('\n').unwrap_or((text, ""));
        if magic.trim_end() != MODEL_MAGIC {
            return Err(Error::Model(format!("bad magic {magic:?}, expected {MODEL_MAGIC}")));
        }
        #[derive(Deserialize)]
        struct Envelope {
            format_version: u32,
            model: ScorerModel,
        }
        let env: Envelope = serde_json::from_str(body).map_err(|e| Error::Model(e.to_string()))?;
        if env.format_version != 1 {
            return Err(Error::Model(format!(
                "unsupported format version {}",
                env.format_version
            )));
        }
        Self::new(env.model.task, env.model.vocab, env.model.classifier)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

/// One line of an ideology training file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdeologyExample {
    pub text: String,
    pub label: String,
}

/// Which classifier head to train, with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeadConfig {
    Lr(LrConfig),
    Mlp(MlpConfig),
}

/// Fits a tf-idf vocabulary on `target text` documents and trains a head on
/// `(target, text, label index)` triples. Ideology data uses an empty target.
pub fn train_scorer(
    task: Task,
    schema: &LabelSchema,
    data: &[(&str, &str, usize)],
    max_vocab: usize,
    head: &HeadConfig,
) -> Result<ScorerModel> {
    let docs: Vec<String> = data.iter().map(|(t, x, _)| format!("{t} {x}")).collect();
    let vocab = fit_tfidf(&docs, max_vocab)?;
    let rows = data.iter().map(|(t, x, _)| vocab.featurize_sparse(t, x)).collect();
    let x = FeatureMatrix::new(vocab.feature_dim(), rows)?;
    let labels: Vec<usize> = data.iter().map(|d| d.2).collect();
    let classifier = match head {
        HeadConfig::Lr(cfg) => Classifier::Linear(train_lr(&x, &labels, schema, cfg)?),
        HeadConfig::Mlp(cfg) => Classifier::Mlp(train_mlp(&x, &labels, schema, cfg)?),
    };
    ScorerModel::new(task, vocab, classifier)
}

/// Scorer backed by locally trained models, one per task.
#[derive(Debug, Clone, Default)]
pub struct BuiltinScorer {
    pub stance: Option<ScorerModel>,
    pub ideology: Option<ScorerModel>,
    pub convention: Convention,
}

impl BuiltinScorer {
    pub fn new(convention: Convention) -> Self {
        Self {
            convention,
            ..Self::default()
        }
    }

    /// Installs `model` in the slot for its task.
    pub fn with_model(mut self, model: ScorerModel) -> Self {
        match model.task {
            Task::Stance => self.stance = Some(model),
            Task::Ideology => self.ideology = Some(model),
        }
        self
    }
}

impl StanceScorer for BuiltinScorer {
    fn score_stance(&self, target: &str, text: &str) -> Result<f64> {
        let m = self
            .stance
            .as_ref()
            .ok_or_else(|| Error::Scorer("no stance model loaded".into()))?;
        signed_score(&m.proba(target, text)?, self.convention)
    }

    fn score_ideology(&self, text: &str) -> Result<f64> {
        let m = self
            .ideology
            .as_ref()
            .ok_or_else(|| Error::Scorer("no ideology model loaded".into()))?;
        signed_score(&m.proba("", text)?, self.convention)
    }
}
