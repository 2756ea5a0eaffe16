//! Stance dataset built from opinions paired with their case's legal question.

mod augment;
mod eval;
mod mask;
mod split;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, OpinionType, WinningParty};
use crate::error::{Error, Result};

pub use augment::{augment_neutral, DEFAULT_NEUTRAL_RATIO};
pub use eval::{evaluate, evaluate_labels, Evaluation, MajorityPredictor, Predictor};
pub use mask::{mask_examples, ner_mask, spans_by_record, EntitySpan, EntityTagger, GazetteerTagger, SpanRecord, LAW};
pub use split::{split, DatasetSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StanceLabel {
    Pro,
    Con,
    Neutral,
}

impl StanceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Pro => "pro",
            StanceLabel::Con => "con",
            StanceLabel::Neutral => "neutral",
        }
    }

    fn flipped(self) -> Self {
        match self {
            StanceLabel::Pro => StanceLabel::Con,
            StanceLabel::Con => StanceLabel::Pro,
            StanceLabel::Neutral => StanceLabel::Neutral,
        }
    }
}

impl std::fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pro" => Ok(StanceLabel::Pro),
            "con" => Ok(StanceLabel::Con),
            "neutral" => Ok(StanceLabel::Neutral),
            other => Err(Error::invalid(format!("unknown stance label {other:?}"))),
        }
    }
}

/// One dataset record. Field order is the on-disk column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StanceExample {
    pub case_id: String,
    pub target: String,
    pub text: String,
    pub label: StanceLabel,
    pub opinion_type: OpinionType,
    pub masked: bool,
}

impl StanceExample {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.case_id.trim().is_empty() {
            return Err("empty case_id".into());
        }
        if self.target.trim().is_empty() {
            return Err("empty target".into());
        }
        if self.text.trim().is_empty() {
            return Err("empty text".into());
        }
        Ok(())
    }
}

/// Reads a dataset file, rejecting the whole file on the first bad line.
pub fn read_dataset(path: &std::path::Path) -> Result<Vec<StanceExample>> {
    let (rows, errors) = crate::io::read_jsonl_with(path, |ex: StanceExample| ex.validate().map(|_| ex))?;
    match errors.into_iter().next() {
        Some(e) => Err(Error::Parse {
            path: path.to_path_buf(),
            line: e.line,
            message: e.message,
        }),
        None => Ok(rows),
    }
}

pub const DEFAULT_TOKEN_LIMIT: usize = 512;

/// `target [SEP] text`, cut to the first `token_limit` whitespace tokens.
pub fn truncate_for_scorer(target: &str, text: &str, token_limit: usize) -> Result<String> {
    let body = truncate_text(target, text, token_limit)?;
    Ok(format!("{target} [SEP] {body}"))
}

/// The part of `text` that survives [`truncate_for_scorer`]; `text` itself
/// when nothing is cut.
pub fn truncate_text<'a>(target: &str, text: &'a str, token_limit: usize) -> Result<std::borrow::Cow<'a, str>> {
    let target_tokens = target.split_whitespace().count();
    if token_limit <= target_tokens + 1 {
        return Err(Error::invalid(format!(
            "token limit {token_limit} leaves no room after a {target_tokens}-token target"
        )));
    }
    let budget = token_limit - target_tokens - 1;
    if text.split_whitespace().count() <= budget {
        return Ok(text.into());
    }
    Ok(text.split_whitespace().take(budget).collect::<Vec<_>>().join(" ").into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    UnclearWinner,
    PerCuriam,
    MissingCase,
    MissingQuestion,
}

/// Questions are phrased so that "yes" favors the petitioner. Majority and
/// concurring opinions side with the disposition; dissents oppose it.
pub fn infer_stance_label(winner: WinningParty, opinion_type: OpinionType) -> std::result::Result<StanceLabel, SkipReason> {
    let disposition = match winner {
        WinningParty::Petitioner => StanceLabel::Pro,
        WinningParty::Respondent => StanceLabel::Con,
        WinningParty::Unclear => return Err(SkipReason::UnclearWinner),
    };
    match opinion_type {
        OpinionType::Majority | OpinionType::Concurring => Ok(disposition),
        OpinionType::Dissenting => Ok(disposition.flipped()),
        OpinionType::PerCuriam => Err(SkipReason::PerCuriam),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub opinions: usize,
    pub examples: usize,
    pub by_label: BTreeMap<StanceLabel, usize>,
    pub skipped: BTreeMap<SkipReason, usize>,
}

/// One example per opinion whose case has a question and a usable label,
/// in store order.
pub fn build_dataset(store: &CorpusStore) -> (Vec<StanceExample>, BuildReport) {
    let mut report = BuildReport {
        opinions: store.opinions().len(),
        ..BuildReport::default()
    };
    let mut out = Vec::new();
    for op in store.opinions() {
        let labelled = store
            .case(&op.case_id)
            .ok_or(SkipReason::MissingCase)
            .and_then(|case| {
                let q = case.question().ok_or(SkipReason::MissingQuestion)?;
                Ok((q, infer_stance_label(case.winning_party, op.opinion_type)?))
            });
        match labelled {
            Ok((question, label)) => {
                *report.by_label.entry(label).or_default() += 1;
                out.push(StanceExample {
                    case_id: op.case_id.clone(),
                    target: question.to_string(),
                    text: op.text.clone(),
                    label,
                    opinion_type: op.opinion_type,
                    masked: false,
                });
            }
            Err(reason) => {
                log::debug!("skipping opinion in case {}: {reason:?}", op.case_id);
                *report.skipped.entry(reason).or_default() += 1;
            }
        }
    }
    report.examples = out.len();
    (out, report)
}
