//! Correlation with significance, the analyses built on it, and the
//! approximate randomization test for comparing classifiers.

mod analysis;
mod randomization;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, compensated_sum};

pub use analysis::{
    align_series, grouped_ideology_correlation, responsiveness_partition, salience_politicality, AlignedSeries,
    CaseHps, GroupResult, GroupedCorrelation, ResponsivenessPartition, SalienceReport, YearCorrelation,
    DEFAULT_MIN_YEARS, MIN_GROUP_SIZE,
};
pub use randomization::{
    accuracy_metric, approx_randomization_sampled, approx_randomization_test, exhaustive_randomization,
    macro_f1_metric, RandomizationResult, MIN_ITERATIONS as MIN_RANDOMIZATION_ITERATIONS,
};

pub const DEFAULT_PERMUTATIONS: usize = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Tolerance used when comparing a resampled statistic to the observed one.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Permutation,
    TApprox,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Permutation => "permutation",
            Method::TApprox => "t_approx",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "permutation" => Ok(Method::Permutation),
            "t_approx" => Ok(Method::TApprox),
            other => Err(Error::invalid(format!("unknown correlation method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonConfig {
    pub method: Method,
    pub permutations: usize,
    pub seed: u64,
}

impl PearsonConfig {
    pub fn permutation(seed: u64) -> Self {
        Self {
            method: Method::Permutation,
            permutations: DEFAULT_PERMUTATIONS,
            seed,
        }
    }

    pub fn t_approx() -> Self {
        Self {
            method: Method::TApprox,
            permutations: 0,
            seed: 0,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
    pub method: Method,
    /// Permutation seed; absent for the t approximation.
    pub seed: Option<u64>,
}

/// Centers a series and returns it with its sum of squares.
fn centered(v: &[f64]) -> (Vec<f64>, f64) {
    let m = compensated_sum(v.iter().copied()) / v.len() as f64;
    let c: Vec<f64> = v.iter().map(|x| x - m).collect();
    let ss = compensated_sum(c.iter().map(|x| x * x));
    (c, ss)
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::invalid(format!("correlation needs at least 3 pairs, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("correlation input contains a non-finite value"));
    }
    Ok(())
}

struct Prepared {
    xc: Vec<f64>,
    yc: Vec<f64>,
    norm: f64,
}

fn prepare(xs: &[f64], ys: &[f64]) -> Result<Prepared> {
    check_pair(xs, ys)?;
    let (xc, sxx) = centered(xs);
    let (yc, syy) = centered(ys);
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid("correlation undefined: a series has zero variance"));
    }
    Ok(Prepared {
        xc,
        yc,
        norm: (sxx * syy).sqrt(),
    })
}

impl Prepared {
    fn r_with(&self, ys: &[f64]) -> f64 {
        let sxy = compensated_sum(self.xc.iter().zip(ys).map(|(a, b)| a * b));
        (sxy / self.norm).clamp(-1.0, 1.0)
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let p = prepare(xs, ys)?;
    Ok(p.r_with(&p.yc))
}

/// Pearson r with a two-sided p-value.
///
/// The permutation p-value is `(1 + #{|r_perm| ≥ |r|}) / (1 + permutations)`;
/// permutation `i` shuffles the y series with an RNG seeded from
/// `sub_seed(seed, i)`, so the result does not depend on thread count.
pub fn pearson(xs: &[f64], ys: &[f64], cfg: &PearsonConfig) -> Result<CorrelationResult> {
    let prep = prepare(xs, ys)?;
    let r = prep.r_with(&prep.yc);
    let n = xs.len();
    let p_value = match cfg.method {
        Method::TApprox => t_test_p(r, n),
        Method::Permutation => {
            if cfg.permutations == 0 {
                return Err(Error::invalid("permutation test needs at least one permutation"));
            }
            let threshold = r.abs() - TIE_EPS;
            let hits: usize = (0..cfg.permutations)
                .into_par_iter()
                .map_init(
                    || prep.yc.clone(),
                    |buf, i| {
                        buf.copy_from_slice(&prep.yc);
                        buf.shuffle(&mut numeric::rng(numeric::sub_seed(cfg.seed, i as u64)));
                        usize::from(prep.r_with(buf).abs() >= threshold)
                    },
                )
                .sum();
            (1 + hits) as f64 / (1 + cfg.permutations) as f64
        }
    };
    Ok(CorrelationResult {
        r,
        p_value,
        n,
        method: cfg.method,
        seed: (cfg.method == Method::Permutation).then_some(cfg.seed),
    })
}

/// Two-sided p-value of `r` under the null via `t = r·sqrt((n-2)/(1-r²))`.
fn t_test_p(r: f64, n: usize) -> f64 {
    let df = n - 2;
    let denom = 1.0 - r * r;
    if denom <= 0.0 {
        return 0.0;
    }
    student_t_two_sided(r.abs() * (df as f64 / denom).sqrt(), df)
}

/// `P(|T| ≥ t)` for Student's t with integer `df ≥ 1`.
///
/// Uses the closed-form finite trigonometric series for integer degrees of
/// freedom (Hill, CACM algorithm 395), exact up to rounding.
pub fn student_t_two_sided(t: f64, df: usize) -> f64 {
    assert!(df >= 1, "degrees of freedom must be positive");
    let t = t.abs();
    if t.is_infinite() {
        return 0.0;
    }
    let theta = (t / (df as f64).sqrt()).atan();
    let (s, c) = theta.sin_cos();
    let c2 = c * c;
    // A(t | df) = P(|T| < t)
    let a = if df % 2 == 1 {
        let mut sum = 0.0;
        if df > 1 {
            let mut term = 1.0;
            sum = 1.0;
            let mut k = 2;
            while k + 1 < df {
                term *= k as f64 / (k + 1) as f64 * c2;
                sum += term;
                k += 2;
            }
        }
        2.0 / std::f64::consts::PI * (theta + s * c * sum)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1;
        while k + 1 < df {
            term *= k as f64 / (k + 1) as f64 * c2;
            sum += term;
            k += 2;
        }
        s * sum
    };
    (1.0 - a).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let affine: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        assert_abs_diff_eq!(pearson_r(&xs, &affine).unwrap(), 1.0, epsilon = 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_abs_diff_eq!(pearson_r(&xs, &neg).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pearson_r(&xs, &[1.0, 3.0, 2.0, 4.0]).unwrap(), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(pearson_r(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
        assert!(pearson_r(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn t_distribution_closed_forms() {
        // df = 1 is Cauchy: P(|T| ≥ 1) = 1/2.
        assert_abs_diff_eq!(student_t_two_sided(1.0, 1), 0.5, epsilon = 1e-15);
        // df = 2: P(|T| ≥ t) = 1 - t / sqrt(2 + t²).
        for t in [0.3, 1.0, 4.0] {
            assert_abs_diff_eq!(student_t_two_sided(t, 2), 1.0 - t / (2.0 + t * t).sqrt(), epsilon = 1e-14);
        }
        assert_eq!(student_t_two_sided(0.0, 7), 1.0);
        // Textbook critical value: t = 2.228 at df = 10 is two-sided 0.05.
        assert_abs_diff_eq!(student_t_two_sided(2.228, 10), 0.05, epsilon = 1e-4);
    }

    #[test]
    fn permutation_is_seeded() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ys = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let cfg = PearsonConfig {
            permutations: 500,
            ..PearsonConfig::permutation(3)
        };
        let a = pearson(&xs, &ys, &cfg).unwrap();
        assert_eq!(a, pearson(&xs, &ys, &cfg).unwrap());
        assert!(a.p_value > 0.0 && a.p_value <= 1.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_affine_invariant(
            xs in prop::collection::vec(-100.0f64..100.0, 3..30),
            seed in any::<u64>(),
            a in 0.1f64..10.0,
            b in -50.0f64..50.0,
        ) {
            use rand::Rng;
            let mut rng = numeric::rng(seed);
            let ys: Vec<f64> = xs.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = pearson_r(&xs, &ys);
            prop_assume!(r.is_ok());
            let r = r.unwrap();
            prop_assert!((r - pearson_r(&ys, &xs).unwrap()).abs() <= 1e-12);
            let xt: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            prop_assert!((r - pearson_r(&xt, &ys).unwrap()).abs() <= 1e-9);
        }
    }
}
