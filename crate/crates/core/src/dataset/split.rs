use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

use super::StanceExample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<StanceExample>,
    pub test: Vec<StanceExample>,
    pub seed: u64,
    pub fraction: f64,
}

/// Seeded shuffle, then the first `round(fraction·n)` examples (at least one,
/// leaving at least one) go to train.
pub fn split(examples: &[StanceExample], fraction: f64, seed: u64) -> Result<DatasetSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("split fraction must lie in (0, 1), got {fraction}")));
    }
    let n = examples.len();
    if n < 2 {
        return Err(Error::invalid(format!("cannot split {n} examples")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut numeric::rng(seed));
    let n_train = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
    let pick = |idx: &[usize]| idx.iter().map(|&i| examples[i].clone()).collect();
    Ok(DatasetSplit {
        train: pick(&order[..n_train]),
        test: pick(&order[n_train..]),
        seed,
        fraction,
    })
}
