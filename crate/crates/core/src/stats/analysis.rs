use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{MetricSeries, AGGREGATE_ENTITY};
use crate::error::{Error, Result};
use crate::metrics::{tenure_summary, JusticeYearScore, MetricKind, Summary};
use crate::numeric::{keyed_seed, sub_seed};

use super::{pearson, CorrelationResult, PearsonConfig};

pub const DEFAULT_MIN_YEARS: usize = 5;
pub const MIN_GROUP_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSeries {
    pub years: Vec<i32>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Years present in only one of the two inputs.
    pub dropped: usize,
}

/// Inner join of two yearly series on year, sorted by year.
pub fn align_series(a: &MetricSeries, b: &MetricSeries, entity_a: &str, entity_b: &str) -> Result<AlignedSeries> {
    let ya = a.by_year(entity_a);
    let yb = b.by_year(entity_b);
    let mut out = AlignedSeries {
        years: Vec::new(),
        xs: Vec::new(),
        ys: Vec::new(),
        dropped: 0,
    };
    for (year, x) in &ya {
        match yb.get(year) {
            Some(y) => {
                out.years.push(*year);
                out.xs.push(*x);
                out.ys.push(*y);
            }
            None => out.dropped += 1,
        }
    }
    out.dropped += yb.keys().filter(|y| !ya.contains_key(y)).count();
    if out.years.is_empty() {
        return Err(Error::invalid(format!(
            "{}:{entity_a} and {}:{entity_b} share no years",
            a.name, b.name
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponsivenessPartition {
    pub alpha: f64,
    pub min_years: usize,
    pub responsive: BTreeSet<String>,
    pub nonresponsive: BTreeSet<String>,
    /// Justices left out, with the reason.
    pub excluded: BTreeMap<String, String>,
    pub results: BTreeMap<String, CorrelationResult>,
}

/// Correlates each justice's yearly ideal point with the yearly mood series.
/// A justice is responsive when `p < alpha` over at least `min_years` years.
/// Justice `j` uses seed `keyed_seed(cfg.seed, j)`.
pub fn responsiveness_partition(
    mq: &MetricSeries,
    mood: &MetricSeries,
    alpha: f64,
    min_years: usize,
    cfg: &PearsonConfig,
) -> ResponsivenessPartition {
    let justices: Vec<&str> = mq.entities().into_iter().collect();
    let outcomes: Vec<(String, std::result::Result<CorrelationResult, String>)> = justices
        .par_iter()
        .map(|&j| {
            let outcome = match align_series(mq, mood, j, AGGREGATE_ENTITY) {
                Err(_) => Err("no years overlap the mood series".to_string()),
                Ok(a) if a.years.len() < min_years.max(3) => {
                    Err(format!("{} overlapping years, need {}", a.years.len(), min_years.max(3)))
                }
                Ok(a) => pearson(&a.xs, &a.ys, &cfg.with_seed(keyed_seed(cfg.seed, j))).map_err(|e| e.to_string()),
            };
            (j.to_string(), outcome)
        })
        .collect();
    let mut part = ResponsivenessPartition {
        alpha,
        min_years,
        responsive: BTreeSet::new(),
        nonresponsive: BTreeSet::new(),
        excluded: BTreeMap::new(),
        results: BTreeMap::new(),
    };
    for (j, outcome) in outcomes {
        match outcome {
            Ok(res) => {
                if res.p_value < alpha {
                    part.responsive.insert(j.clone());
                } else {
                    part.nonresponsive.insert(j.clone());
                }
                part.results.insert(j, res);
            }
            Err(reason) => {
                log::info!("justice {j} excluded from partition: {reason}");
                part.excluded.insert(j, reason);
            }
        }
    }
    part
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    /// `(justice, language score, ideal point)` per justice used.
    pub points: Vec<(String, f64, f64)>,
    pub result: Option<CorrelationResult>,
    /// Why `result` is absent.
    pub flag: Option<String>,
    /// Partition members that had no language or ideal-point scores.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedCorrelation {
    pub responsive: GroupResult,
    pub nonresponsive: GroupResult,
}

fn group_result(
    members: &BTreeSet<String>,
    scores: &[JusticeYearScore],
    metric: MetricKind,
    mq: &MetricSeries,
    summary: Summary,
    cfg: &PearsonConfig,
) -> GroupResult {
    let mut points = Vec::new();
    let mut missing = Vec::new();
    for j in members {
        let lang = tenure_summary(scores, j, metric, summary).ok();
        let ideal: Vec<f64> = mq.by_year(j).into_values().collect();
        match (lang, summary.apply(&ideal)) {
            (Some(l), Some(m)) => points.push((j.clone(), l, m)),
            _ => missing.push(j.clone()),
        }
    }
    let (result, flag) = if points.len() < MIN_GROUP_SIZE {
        (None, Some(format!("group has {} justices, need {MIN_GROUP_SIZE}", points.len())))
    } else {
        let xs: Vec<f64> = points.iter().map(|p| p.1).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
        match pearson(&xs, &ys, cfg) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    GroupResult {
        points,
        result,
        flag,
        missing,
    }
}

/// Within each partition group, correlates per-justice tenure summaries of
/// a language metric with tenure summaries of the ideal points.
pub fn grouped_ideology_correlation(
    scores: &[JusticeYearScore],
    metric: MetricKind,
    mq: &MetricSeries,
    partition: &ResponsivenessPartition,
    summary: Summary,
    cfg: &PearsonConfig,
) -> GroupedCorrelation {
    GroupedCorrelation {
        responsive: group_result(
            &partition.responsive,
            scores,
            metric,
            mq,
            summary,
            &cfg.with_seed(keyed_seed(cfg.seed, "responsive")),
        ),
        nonresponsive: group_result(
            &partition.nonresponsive,
            scores,
            metric,
            mq,
            summary,
            &cfg.with_seed(keyed_seed(cfg.seed, "nonresponsive")),
        ),
    }
}

/// Holistic score of one case's opinion text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseHps {
    pub case_id: String,
    pub year: i32,
    pub hps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearCorrelation {
    /// `None` for the pooled correlation over all years.
    pub year: Option<i32>,
    /// `(case, |hps|, salience)`.
    pub points: Vec<(String, f64, f64)>,
    pub result: CorrelationResult,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SalienceReport {
    pub correlations: Vec<YearCorrelation>,
    pub skipped: BTreeMap<i32, String>,
    /// Cases with a score but no salience value for their year.
    pub unmatched: usize,
}

/// Correlates `|hps|` with case salience, per year or pooled. Salience is
/// looked up by `(case_id, year)`. Year `y` uses seed `sub_seed(cfg.seed, y)`.
pub fn salience_politicality(
    cases: &[CaseHps],
    salience: &MetricSeries,
    by_year: bool,
    cfg: &PearsonConfig,
) -> SalienceReport {
    let mut report = SalienceReport::default();
    let mut groups: BTreeMap<Option<i32>, Vec<(String, f64, f64)>> = BTreeMap::new();
    for c in cases {
        match salience.get(&c.case_id, c.year) {
            Some(s) => groups
                .entry(by_year.then_some(c.year))
                .or_default()
                .push((c.case_id.clone(), c.hps.abs(), s)),
            None => report.unmatched += 1,
        }
    }
    for (year, points) in groups {
        let key = year.unwrap_or(0);
        if points.len() < 3 {
            report.skipped.insert(key, format!("{} cases", points.len()));
            continue;
        }
        let xs: Vec<f64> = points.iter().map(|p| p.1).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
        match pearson(&xs, &ys, &cfg.with_seed(sub_seed(cfg.seed, key as u64))) {
            Ok(result) => report.correlations.push(YearCorrelation { year, points, result }),
            Err(e) => {
                report.skipped.insert(key, e.to_string());
            }
        }
    }
    report
}
