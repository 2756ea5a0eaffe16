use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric;

use super::{StanceExample, StanceLabel};

pub const DEFAULT_NEUTRAL_RATIO: f64 = 0.5;

/// Appends `⌊ratio·n⌋` neutral examples. Each takes the text of a uniformly
/// drawn example and the question of a uniformly drawn *other* case.
pub fn augment_neutral(examples: &[StanceExample], ratio: f64, seed: u64) -> Result<Vec<StanceExample>> {
    if !ratio.is_finite() || ratio < 0.0 {
        return Err(Error::invalid(format!("neutral ratio must be a non-negative number, got {ratio}")));
    }
    let k = (ratio * examples.len() as f64).floor() as usize;
    if k == 0 {
        return Ok(examples.to_vec());
    }
    // First question seen per case, in case-id order.
    let mut questions: BTreeMap<&str, &str> = BTreeMap::new();
    for ex in examples {
        questions.entry(&ex.case_id).or_insert(&ex.target);
    }
    let cases: Vec<(&str, &str)> = questions.into_iter().collect();
    if cases.len() < 2 {
        return Err(Error::invalid("neutral augmentation needs at least two distinct cases"));
    }
    let position: BTreeMap<&str, usize> = cases.iter().enumerate().map(|(i, (c, _))| (*c, i)).collect();

    let mut rng = numeric::rng(seed);
    let mut out = examples.to_vec();
    out.reserve(k);
    for _ in 0..k {
        let source = &examples[rng.random_range(0..examples.len())];
        let own = position[source.case_id.as_str()];
        let mut j = rng.random_range(0..cases.len() - 1);
        if j >= own {
            j += 1;
        }
        out.push(StanceExample {
            case_id: source.case_id.clone(),
            target: cases[j].1.to_string(),
            text: source.text.clone(),
            label: StanceLabel::Neutral,
            opinion_type: source.opinion_type,
            masked: source.masked,
        });
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::corpus::OpinionType;

    pub(crate) fn examples(n: usize, cases: usize) -> Vec<StanceExample> {
        (0..n)
            .map(|i| StanceExample {
                case_id: format!("c{}", i % cases),
                target: format!("question {}", i % cases),
                text: format!("text {i}"),
                label: if i % 2 == 0 { StanceLabel::Pro } else { StanceLabel::Con },
                opinion_type: OpinionType::Majority,
                masked: false,
            })
            .collect()
    }

    #[test]
    fn ratio_zero_is_identity() {
        let ex = examples(10, 3);
        assert_eq!(augment_neutral(&ex, 0.0, 1).unwrap(), ex);
    }

    #[test]
    fn ten_at_half() {
        let ex = examples(10, 4);
        let out = augment_neutral(&ex, 0.5, 7).unwrap();
        assert_eq!(out.len(), 15);
        let neutral: Vec<_> = out.iter().filter(|e| e.label == StanceLabel::Neutral).collect();
        assert_eq!(neutral.len(), 5);
        for n in neutral {
            let own_q = ex.iter().find(|e| e.case_id == n.case_id).unwrap();
            assert_ne!(n.target, own_q.target);
        }
        assert_eq!(out, augment_neutral(&ex, 0.5, 7).unwrap());
    }

    #[test]
    fn single_case_is_an_error() {
        assert!(augment_neutral(&examples(5, 1), 0.5, 0).is_err());
        assert!(augment_neutral(&examples(5, 2), -1.0, 0).is_err());
    }
}
