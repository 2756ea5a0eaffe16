use std::collections::BTreeMap;

use crate::error::Result;
use crate::numeric;

use super::{CorpusStore, EmotionLexicon, SpeakerRole, Statement};

/// Emotion-filtered justice statements grouped by (justice, year).
///
/// Advocate and unattributed speech never enters the pool.
#[derive(Debug, Clone, Default)]
pub struct StatementPool {
    groups: BTreeMap<(String, i32), Vec<Statement>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub statements: Vec<Statement>,
    /// Set when the (justice, year) pool had no statements.
    pub empty_pool: bool,
}

impl StatementPool {
    pub fn new(store: &CorpusStore, lexicon: &EmotionLexicon) -> Result<Self> {
        let filtered = super::emotion_filter(store.statements(), lexicon)?;
        Ok(Self::from_statements(filtered))
    }

    /// Groups already-filtered statements.
    pub fn from_statements(statements: impl IntoIterator<Item = Statement>) -> Self {
        let mut groups: BTreeMap<(String, i32), Vec<Statement>> = BTreeMap::new();
        for s in statements {
            if s.speaker_role == SpeakerRole::Justice {
                groups.entry((s.speaker_id.clone(), s.year)).or_default().push(s);
            }
        }
        Self { groups }
    }

    pub fn available(&self, justice_id: &str, year: i32) -> usize {
        self.groups
            .get(&(justice_id.to_string(), year))
            .map_or(0, Vec::len)
    }

    /// All (justice, year) keys with at least one statement.
    pub fn justice_years(&self) -> impl Iterator<Item = (&str, i32)> {
        self.groups.keys().map(|(j, y)| (j.as_str(), *y))
    }

    /// Uniform sample without replacement of `min(n, available)` statements,
    /// returned in pool order. Deterministic for a given seed.
    pub fn sample(&self, justice_id: &str, year: i32, n: usize, seed: u64) -> Sample {
        assert!(n >= 1, "sample size must be at least 1");
        let Some(pool) = self.groups.get(&(justice_id.to_string(), year)) else {
            log::warn!("no statements for justice {justice_id} in {year}");
            return Sample {
                statements: Vec::new(),
                empty_pool: true,
            };
        };
        if n >= pool.len() {
            return Sample {
                statements: pool.clone(),
                empty_pool: false,
            };
        }
        let mut rng = numeric::rng(numeric::keyed_seed(seed, &format!("{justice_id}\u{1f}{year}")));
        let mut idx = rand::seq::index::sample(&mut rng, pool.len(), n).into_vec();
        idx.sort_unstable();
        Sample {
            statements: idx.into_iter().map(|i| pool[i].clone()).collect(),
            empty_pool: false,
        }
    }
}
