use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

use super::Statement;

/// Tokens used for lexicon lookup: whitespace split, edge punctuation
/// stripped, lowercased.
pub fn lexicon_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace().filter_map(|tok| {
        let t = tok.trim_matches(|c: char| !c.is_alphanumeric());
        (!t.is_empty()).then(|| t.to_lowercase())
    })
}

/// Word → emotion tags. Lookup is case-insensitive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmotionLexicon {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl EmotionLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, emotion: &str) -> Result<()> {
        let w = word.trim().to_lowercase();
        if w.is_empty() {
            return Err(Error::invalid("empty lexicon word"));
        }
        if w.split_whitespace().count() != 1 {
            return Err(Error::invalid(format!("lexicon word {w:?} is not a single token")));
        }
        self.entries
            .entry(w)
            .or_default()
            .insert(emotion.trim().to_string());
        Ok(())
    }

    /// Parses the three-column NRC layout (`word<TAB>emotion<TAB>flag`).
    /// Only rows with flag `1` are loaded.
    pub fn from_nrc_reader<R: BufRead>(reader: R, source: &Path) -> Result<Self> {
        let mut lex = Self::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: source.to_path_buf(),
                line: idx + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(parse_err(format!("expected 3 tab-separated columns, got {}", cols.len())));
            }
            match cols[2].trim() {
                "1" => lex.insert(cols[0], cols[1]).map_err(|e| parse_err(e.to_string()))?,
                "0" => {}
                other => return Err(parse_err(format!("flag must be 0 or 1, got {other:?}"))),
            }
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_nrc_reader(std::io::BufReader::new(f), path)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_lowercase())
    }

    pub fn emotions(&self, word: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True if any token of `text` is a lexicon word.
    pub fn matches(&self, text: &str) -> bool {
        lexicon_tokens(text).any(|t| self.entries.contains_key(&t))
    }
}

/// Keeps the statements containing at least one lexicon word, in input order.
pub fn emotion_filter(statements: &[Statement], lexicon: &EmotionLexicon) -> Result<Vec<Statement>> {
    if lexicon.is_empty() {
        return Err(Error::invalid("emotion lexicon is empty"));
    }
    Ok(statements
        .iter()
        .filter(|s| lexicon.matches(&s.text))
        .cloned()
        .collect())
}
