use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::evaluate_labels;
use crate::error::{Error, Result};
use crate::numeric;
use crate::scorer::LabelSchema;

use super::TIE_EPS;

pub const MIN_ITERATIONS: usize = 100;
/// Largest example count for which exhaustive enumeration is attempted.
const MAX_EXHAUSTIVE_N: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomizationResult {
    pub p_value: f64,
    /// `metric(a) - metric(b)` on the unswapped predictions.
    pub observed_delta: f64,
    /// Swap assignments evaluated.
    pub iterations: usize,
    pub exhaustive: bool,
}

pub fn accuracy_metric(preds: &[usize], golds: &[usize]) -> f64 {
    let hits = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    hits as f64 / golds.len() as f64
}

/// Macro-F1 over `n_classes` index-encoded labels (NaN on invalid input).
pub fn macro_f1_metric(n_classes: usize) -> impl Fn(&[usize], &[usize]) -> f64 + Sync {
    let schema = LabelSchema::new((0..n_classes).map(|i| i.to_string()).collect());
    move |p, g| evaluate_labels(p, g, &schema).map_or(f64::NAN, |e| e.macro_f1)
}

struct Prepared<'a, M> {
    metric: &'a M,
    a: &'a [usize],
    b: &'a [usize],
    golds: &'a [usize],
    threshold: f64,
    observed: f64,
}

fn prepare<'a, M>(metric: &'a M, a: &'a [usize], b: &'a [usize], golds: &'a [usize]) -> Result<Prepared<'a, M>>
where
    M: Fn(&[usize], &[usize]) -> f64 + Sync,
{
    if a.len() != golds.len() || b.len() != golds.len() {
        return Err(Error::DimensionMismatch {
            expected: golds.len(),
            actual: if a.len() != golds.len() { a.len() } else { b.len() },
        });
    }
    if golds.is_empty() {
        return Err(Error::invalid("randomization test needs at least one example"));
    }
    let observed = metric(a, golds) - metric(b, golds);
    if !observed.is_finite() {
        return Err(Error::invalid("metric is undefined on the supplied predictions"));
    }
    Ok(Prepared {
        metric,
        a,
        b,
        golds,
        threshold: observed.abs() - TIE_EPS,
        observed,
    })
}

impl<M: Fn(&[usize], &[usize]) -> f64 + Sync> Prepared<'_, M> {
    /// Whether the swap pattern `swap(i)` reaches the observed difference.
    fn extreme(&self, sa: &mut Vec<usize>, sb: &mut Vec<usize>, swap: impl Fn(usize) -> bool) -> bool {
        sa.clear();
        sb.clear();
        for i in 0..self.golds.len() {
            let (x, y) = if swap(i) { (self.b[i], self.a[i]) } else { (self.a[i], self.b[i]) };
            sa.push(x);
            sb.push(y);
        }
        ((self.metric)(sa, self.golds) - (self.metric)(sb, self.golds)).abs() >= self.threshold
    }
}

/// Exact two-sided p-value: the share of all `2^n` swap patterns whose
/// metric difference is at least as large as the observed one.
pub fn exhaustive_randomization<M>(metric: &M, a: &[usize], b: &[usize], golds: &[usize]) -> Result<RandomizationResult>
where
    M: Fn(&[usize], &[usize]) -> f64 + Sync,
{
    let prep = prepare(metric, a, b, golds)?;
    let n = golds.len();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::invalid(format!("exhaustive enumeration limited to {MAX_EXHAUSTIVE_N} examples")));
    }
    let total = 1usize << n;
    let hits: usize = (0..total)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(n), Vec::with_capacity(n)),
            |(sa, sb), mask| usize::from(prep.extreme(sa, sb, |i| mask >> i & 1 == 1)),
        )
        .sum();
    Ok(RandomizationResult {
        p_value: hits as f64 / total as f64,
        observed_delta: prep.observed,
        iterations: total,
        exhaustive: true,
    })
}

/// Monte Carlo p-value `(1 + c) / (1 + iterations)`, each iteration swapping
/// every example's prediction pair with probability 1/2. Iteration `i` draws
/// from `sub_seed(seed, i)`.
pub fn approx_randomization_sampled<M>(
    metric: &M,
    a: &[usize],
    b: &[usize],
    golds: &[usize],
    iterations: usize,
    seed: u64,
) -> Result<RandomizationResult>
where
    M: Fn(&[usize], &[usize]) -> f64 + Sync,
{
    if iterations < MIN_ITERATIONS {
        return Err(Error::invalid(format!("need at least {MIN_ITERATIONS} iterations, got {iterations}")));
    }
    let prep = prepare(metric, a, b, golds)?;
    let n = golds.len();
    let hits: usize = (0..iterations)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(n), Vec::with_capacity(n), vec![false; n]),
            |(sa, sb, flips), it| {
                let mut rng = numeric::rng(numeric::sub_seed(seed, it as u64));
                flips.iter_mut().for_each(|f| *f = rng.random::<bool>());
                usize::from(prep.extreme(sa, sb, |i| flips[i]))
            },
        )
        .sum();
    Ok(RandomizationResult {
        p_value: (1 + hits) as f64 / (1 + iterations) as f64,
        observed_delta: prep.observed,
        iterations,
        exhaustive: false,
    })
}

/// Approximate randomization test for `metric(a) - metric(b)`.
///
/// When `2^n ≤ iterations` every swap pattern is enumerated instead of
/// sampled, giving the exact p-value.
pub fn approx_randomization_test<M>(
    metric: &M,
    a: &[usize],
    b: &[usize],
    golds: &[usize],
    iterations: usize,
    seed: u64,
) -> Result<RandomizationResult>
where
    M: Fn(&[usize], &[usize]) -> f64 + Sync,
{
    if iterations < MIN_ITERATIONS {
        return Err(Error::invalid(format!("need at least {MIN_ITERATIONS} iterations, got {iterations}")));
    }
    let n = golds.len();
    if n <= MAX_EXHAUSTIVE_N && (1usize << n) <= iterations {
        exhaustive_randomization(metric, a, b, golds)
    } else {
        approx_randomization_sampled(metric, a, b, golds, iterations, seed)
    }
}
