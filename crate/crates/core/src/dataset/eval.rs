use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scorer::{LabelSchema, ScorerModel};

use super::StanceExample;

/// Anything that maps a (target, text) pair to a label name.
pub trait Predictor: Sync {
    fn predict(&self, target: &str, text: &str) -> Result<String>;
}

impl Predictor for ScorerModel {
    fn predict(&self, target: &str, text: &str) -> Result<String> {
        self.predict_label(target, text).map(str::to_string)
    }
}

/// Always answers the most frequent training label (ties go to the label
/// listed first in the schema).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityPredictor {
    pub label: String,
}

impl MajorityPredictor {
    pub fn fit(train: &[StanceExample], schema: &LabelSchema) -> Result<Self> {
        let mut counts = vec![0usize; schema.len()];
        for ex in train {
            let i = schema
                .index_of(ex.label.as_str())
                .ok_or_else(|| Error::invalid(format!("label {} outside schema", ex.label)))?;
            counts[i] += 1;
        }
        if train.is_empty() {
            return Err(Error::invalid("majority predictor needs training examples"));
        }
        let best = (0..counts.len()).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
        Ok(Self {
            label: schema.labels()[best].clone(),
        })
    }
}

impl Predictor for MajorityPredictor {
    fn predict(&self, _target: &str, _text: &str) -> Result<String> {
        Ok(self.label.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub labels: Vec<String>,
    pub n: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class_f1: Vec<f64>,
    /// Rows are gold labels, columns predictions.
    pub confusion: Vec<Vec<u64>>,
}

/// Scores index-encoded predictions. Per-class F1 is `2tp / (2tp + fp + fn)`
/// and counts as 0 when that class has no true positives; macro-F1 averages
/// over every class of the schema.
pub fn evaluate_labels(predictions: &[usize], golds: &[usize], schema: &LabelSchema) -> Result<Evaluation> {
    let k = schema.len();
    if predictions.is_empty() {
        return Err(Error::invalid("evaluation needs at least one example"));
    }
    if predictions.len() != golds.len() {
        return Err(Error::DimensionMismatch {
            expected: golds.len(),
            actual: predictions.len(),
        });
    }
    let mut confusion = vec![vec![0u64; k]; k];
    for (&p, &g) in predictions.iter().zip(golds) {
        if p >= k || g >= k {
            return Err(Error::invalid(format!("label index {} outside {k}-class schema", p.max(g))));
        }
        confusion[g][p] += 1;
    }
    let per_class_f1: Vec<f64> = (0..k)
        .map(|c| {
            let tp = confusion[c][c];
            let fp: u64 = (0..k).filter(|&g| g != c).map(|g| confusion[g][c]).sum();
            let fneg: u64 = (0..k).filter(|&p| p != c).map(|p| confusion[c][p]).sum();
            if tp == 0 {
                0.0
            } else {
                (2 * tp) as f64 / (2 * tp + fp + fneg) as f64
            }
        })
        .collect();
    let correct: u64 = (0..k).map(|c| confusion[c][c]).sum();
    Ok(Evaluation {
        labels: schema.labels().to_vec(),
        n: predictions.len(),
        accuracy: correct as f64 / predictions.len() as f64,
        macro_f1: per_class_f1.iter().sum::<f64>() / k as f64,
        per_class_f1,
        confusion,
    })
}

/// Runs `predictor` over `test` in parallel and scores it against gold.
pub fn evaluate(predictor: &dyn Predictor, test: &[StanceExample], schema: &LabelSchema) -> Result<Evaluation> {
    let index = |label: &str| {
        schema
            .index_of(label)
            .ok_or_else(|| Error::invalid(format!("label {label} outside schema {:?}", schema.labels())))
    };
    let golds = test
        .iter()
        .map(|ex| index(ex.label.as_str()))
        .collect::<Result<Vec<_>>>()?;
    let predictions = test
        .par_iter()
        .map(|ex| index(&predictor.predict(&ex.target, &ex.text)?))
        .collect::<Result<Vec<_>>>()?;
    evaluate_labels(&predictions, &golds, schema)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::OpinionType;
    use crate::dataset::StanceLabel;

    fn ex(label: StanceLabel) -> StanceExample {
        StanceExample {
            case_id: "c".into(),
            target: "q".into(),
            text: "t".into(),
            label,
            opinion_type: OpinionType::Majority,
            masked: false,
        }
    }

    #[test]
    fn always_pro_on_three_to_one() {
        let schema = LabelSchema::stance_binary();
        let test: Vec<_> = [StanceLabel::Pro, StanceLabel::Pro, StanceLabel::Pro, StanceLabel::Con]
            .into_iter()
            .map(ex)
            .collect();
        let maj = MajorityPredictor::fit(&test, &schema).unwrap();
        assert_eq!(maj.label, "pro");
        let e = evaluate(&maj, &test, &schema).unwrap();
        assert_eq!(e.accuracy, 0.75);
        assert_eq!(e.per_class_f1, vec![0.0, 6.0 / 7.0]);
        assert!((e.macro_f1 - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_predictions() {
        let s = LabelSchema::three_class();
        let e = evaluate_labels(&[0, 1, 2, 1], &[0, 1, 2, 1], &s).unwrap();
        assert_eq!((e.accuracy, e.macro_f1), (1.0, 1.0));
    }

    #[test]
    fn errors() {
        let s = LabelSchema::stance_binary();
        assert!(evaluate_labels(&[], &[], &s).is_err());
        assert!(evaluate_labels(&[0], &[0, 1], &s).is_err());
        assert!(evaluate_labels(&[2], &[0], &s).is_err());
        let maj = MajorityPredictor { label: "pro".into() };
        assert!(evaluate(&maj, &[ex(StanceLabel::Neutral)], &s).is_err());
    }
}
