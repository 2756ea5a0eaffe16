use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::lexicon_tokens;
use crate::error::{Error, Result};

use super::features::SparseVec;

pub const DEFAULT_MAX_VOCAB: usize = 50_000;

/// Fitted tf-idf vocabulary.
///
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`, term frequency is the raw
/// count. Terms are indexed in selection order (document frequency
/// descending, ties lexicographic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct TfidfVocab {
    index: HashMap<String, usize>,
    terms: Vec<String>,
    idf: Vec<f64>,
    n_docs: usize,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    terms: Vec<String>,
    idf: Vec<f64>,
    n_docs: usize,
}

impl From<VocabRepr> for TfidfVocab {
    fn from(r: VocabRepr) -> Self {
        let index = r.terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self {
            index,
            terms: r.terms,
            idf: r.idf,
            n_docs: r.n_docs,
        }
    }
}

impl From<TfidfVocab> for VocabRepr {
    fn from(v: TfidfVocab) -> Self {
        Self {
            terms: v.terms,
            idf: v.idf,
            n_docs: v.n_docs,
        }
    }
}

pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    lexicon_tokens(text)
}

/// Fits a vocabulary of the `max_vocab` highest-document-frequency terms.
pub fn fit_tfidf<S: AsRef<str>>(documents: &[S], max_vocab: usize) -> Result<TfidfVocab> {
    if max_vocab == 0 {
        return Err(Error::invalid("max_vocab must be at least 1"));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in documents {
        let mut seen: Vec<String> = tokenize(doc.as_ref()).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_default() += 1;
        }
    }
    if df.is_empty() {
        return Err(Error::invalid("cannot fit tf-idf: corpus has no tokens"));
    }
    let n = documents.len();
    let mut ranked: Vec<(String, usize)> = df.into_iter().collect();
    // BTreeMap order makes the sort below lexicographic within equal df.
    ranked.sort_by_key(|&(_, d)| std::cmp::Reverse(d));
    ranked.truncate(max_vocab);
    let idf = ranked
        .iter()
        .map(|(_, d)| ((1.0 + n as f64) / (1.0 + *d as f64)).ln() + 1.0)
        .collect();
    let terms: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(TfidfVocab {
        index,
        terms,
        idf,
        n_docs: n,
    })
}

impl TfidfVocab {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf[i])
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Width of [`featurize`](Self::featurize) output: two halves of `len()`.
    pub fn feature_dim(&self) -> usize {
        2 * self.len()
    }

    /// L2-normalized tf-idf of one text, offset by `offset` (sparse, sorted).
    fn half(&self, text: &str, offset: usize) -> SparseVec {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokenize(text) {
            if let Some(&i) = self.index.get(&t) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let mut indices = Vec::with_capacity(counts.len());
        let mut values = Vec::with_capacity(counts.len());
        for (i, c) in counts {
            indices.push(i + offset);
            values.push(c * self.idf[i]);
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        SparseVec { indices, values }
    }

    /// `[tfidf(target) ; tfidf(text)]`, each half L2-normalized independently.
    pub fn featurize_sparse(&self, target: &str, text: &str) -> SparseVec {
        let mut a = self.half(target, 0);
        let b = self.half(text, self.len());
        a.indices.extend(b.indices);
        a.values.extend(b.values);
        a
    }

    pub fn featurize(&self, target: &str, text: &str) -> Vec<f64> {
        self.featurize_sparse(target, text).to_dense(self.feature_dim())
    }
}
