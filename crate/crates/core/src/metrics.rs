//! Issue-specific stance (ISS) and holistic political stance (HPS).
//!
//! ISS of a text is the summed stance toward conservative targets minus the
//! summed stance toward liberal targets. HPS is the signed output of a binary
//! ideology classifier. Both are averaged over a seeded yearly sample of each
//! justice's emotion-bearing statements.

use serde::{Deserialize, Serialize};

use crate::corpus::{StatementPool, TargetSet};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, mean, median};
use crate::scorer::StanceScorer;

pub const DEFAULT_SAMPLE_SIZE: usize = 1000;
pub const DEFAULT_MIN_STATEMENTS: usize = 25;

fn checked(score: f64) -> Result<f64> {
    if score.is_finite() && (-1.0..=1.0).contains(&score) {
        Ok(score)
    } else {
        Err(Error::Scorer(format!("score {score} outside [-1, 1]")))
    }
}

fn orient(value: f64, higher_is_conservative: bool) -> f64 {
    if higher_is_conservative {
        value
    } else {
        -value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IssConfig {
    pub targets: TargetSet,
    pub higher_is_conservative: bool,
}

impl IssConfig {
    /// Both target lists must be non-empty.
    pub fn new(targets: TargetSet, higher_is_conservative: bool) -> Result<Self> {
        targets.validate()?;
        if targets.liberal.is_empty() || targets.conservative.is_empty() {
            return Err(Error::invalid("ISS needs at least one liberal and one conservative target"));
        }
        Ok(Self {
            targets,
            higher_is_conservative,
        })
    }

    pub fn iss(&self, text: &str, scorer: &dyn StanceScorer) -> Result<f64> {
        iss(text, &self.targets, self.higher_is_conservative, scorer)
    }
}

/// ISS of one text. Any scorer failure aborts the whole sum.
pub fn iss(text: &str, targets: &TargetSet, higher_is_conservative: bool, scorer: &dyn StanceScorer) -> Result<f64> {
    let side = |ts: &[String]| -> Result<f64> {
        let scores = ts
            .iter()
            .map(|t| scorer.score_stance(t, text).and_then(checked))
            .collect::<Result<Vec<_>>>()?;
        Ok(compensated_sum(scores))
    };
    let value = side(&targets.conservative)? - side(&targets.liberal)?;
    Ok(orient(value, higher_is_conservative))
}

/// ISS for many texts, issuing one batched scorer call per target.
pub fn iss_batch(
    texts: &[&str],
    targets: &TargetSet,
    higher_is_conservative: bool,
    scorer: &dyn StanceScorer,
) -> Result<Vec<f64>> {
    let side = |ts: &[String]| -> Result<Vec<f64>> {
        let mut per_target = Vec::with_capacity(ts.len());
        for t in ts {
            let scores = scorer.score_stance_batch(t, texts)?;
            per_target.push(scores.into_iter().map(checked).collect::<Result<Vec<_>>>()?);
        }
        Ok((0..texts.len())
            .map(|i| compensated_sum(per_target.iter().map(|s| s[i])))
            .collect())
    };
    let cons = side(&targets.conservative)?;
    let lib = side(&targets.liberal)?;
    Ok(cons
        .into_iter()
        .zip(lib)
        .map(|(c, l)| orient(c - l, higher_is_conservative))
        .collect())
}

pub fn hps(text: &str, scorer: &dyn StanceScorer, higher_is_conservative: bool) -> Result<f64> {
    let s = checked(scorer.score_ideology(text)?)?;
    Ok(orient(s, higher_is_conservative))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Iss,
    Hps,
    Both,
}

impl Which {
    fn iss(self) -> bool {
        matches!(self, Which::Iss | Which::Both)
    }

    fn hps(self) -> bool {
        matches!(self, Which::Hps | Which::Both)
    }
}

/// One output record per (justice, year).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JusticeYearScore {
    pub justice_id: String,
    pub year: i32,
    pub iss: Option<f64>,
    pub hps: Option<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsConfig {
    pub targets: TargetSet,
    pub higher_is_conservative: bool,
    pub sample_size: usize,
    /// Years with fewer filtered statements are flagged low-confidence.
    pub min_statements: usize,
    pub which: Which,
}

impl MetricsConfig {
    pub fn new(targets: TargetSet, which: Which) -> Self {
        Self {
            targets,
            higher_is_conservative: true,
            sample_size: DEFAULT_SAMPLE_SIZE,
            min_statements: DEFAULT_MIN_STATEMENTS,
            which,
        }
    }
}

/// Mean per-statement scores over the seeded sample for one justice-year.
pub fn justice_year_scores(
    pool: &StatementPool,
    justice_id: &str,
    year: i32,
    seed: u64,
    cfg: &MetricsConfig,
    scorer: &dyn StanceScorer,
) -> Result<JusticeYearScore> {
    if cfg.sample_size == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    if cfg.which.iss() && cfg.targets.is_empty() {
        return Err(Error::invalid("ISS requested without targets"));
    }
    let sample = pool.sample(justice_id, year, cfg.sample_size, seed);
    let texts: Vec<&str> = sample.statements.iter().map(|s| s.text.as_str()).collect();
    let (mut iss_mean, mut hps_mean) = (None, None);
    if !texts.is_empty() {
        if cfg.which.iss() {
            iss_mean = mean(&iss_batch(&texts, &cfg.targets, cfg.higher_is_conservative, scorer)?);
        }
        if cfg.which.hps() {
            let scores = scorer
                .score_ideology_batch(&texts)?
                .into_iter()
                .map(|s| checked(s).map(|s| orient(s, cfg.higher_is_conservative)))
                .collect::<Result<Vec<_>>>()?;
            hps_mean = mean(&scores);
        }
    }
    Ok(JusticeYearScore {
        justice_id: justice_id.to_string(),
        year,
        iss: iss_mean,
        hps: hps_mean,
        n_samples: texts.len(),
        seed,
        low_confidence: pool.available(justice_id, year) < cfg.min_statements,
    })
}

/// Scores every (justice, year) present in the pool, in key order.
pub fn all_justice_year_scores(
    pool: &StatementPool,
    seed: u64,
    cfg: &MetricsConfig,
    scorer: &dyn StanceScorer,
) -> Result<Vec<JusticeYearScore>> {
    pool.justice_years()
        .map(|(j, y)| justice_year_scores(pool, j, y, seed, cfg, scorer))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Iss,
    Hps,
}

impl MetricKind {
    pub fn of(self, s: &JusticeYearScore) -> Option<f64> {
        match self {
            MetricKind::Iss => s.iss,
            MetricKind::Hps => s.hps,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summary {
    #[default]
    Mean,
    Median,
}

impl Summary {
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        match self {
            Summary::Mean => mean(values),
            Summary::Median => median(values),
        }
    }
}

/// Mean or median of a justice's yearly scores over their tenure.
pub fn tenure_summary(scores: &[JusticeYearScore], justice_id: &str, metric: MetricKind, stat: Summary) -> Result<f64> {
    let values: Vec<f64> = scores
        .iter()
        .filter(|s| s.justice_id == justice_id)
        .filter_map(|s| metric.of(s))
        .collect();
    stat.apply(&values)
        .ok_or_else(|| Error::invalid(format!("no {metric:?} scores for justice {justice_id}")))
}
