//! Corpus store: validated transcripts, opinions and case metadata.
//!
//! A [`CorpusBuilder`] ingests line-delimited record files, collecting
//! malformed lines into an error report. [`CorpusBuilder::build`] freezes the
//! records into an immutable [`CorpusStore`] in canonical order (stable by
//! `case_id`, then original record index).

mod lexicon;
mod metric;
mod pool;
mod targets;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{self, LineError};

pub use lexicon::{emotion_filter, lexicon_tokens, EmotionLexicon};
pub use metric::{ingest_metric_table, ColumnMapping, MetricSeries, MetricTable, AGGREGATE_ENTITY};
pub use pool::{Sample, StatementPool};
pub use targets::TargetSet;

pub const MIN_STATEMENT_YEAR: i32 = 1955;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeakerRole {
    Justice,
    Advocate,
    Other,
}

/// One line of oral-argument dialogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub case_id: String,
    pub year: i32,
    pub speaker_id: String,
    pub speaker_role: SpeakerRole,
    pub text: String,
}

impl Statement {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.case_id.trim().is_empty() {
            return Err("empty case_id".into());
        }
        if !(MIN_STATEMENT_YEAR..=MAX_YEAR).contains(&self.year) {
            return Err(format!(
                "year {} outside [{MIN_STATEMENT_YEAR}, {MAX_YEAR}]",
                self.year
            ));
        }
        if self.speaker_id.trim().is_empty() {
            return Err("empty speaker_id".into());
        }
        if self.text.trim().is_empty() {
            return Err("empty text".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpinionType {
    Majority,
    Concurring,
    Dissenting,
    PerCuriam,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opinion {
    pub case_id: String,
    pub year: i32,
    pub author_id: String,
    pub opinion_type: OpinionType,
    pub text: String,
}

impl Opinion {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.case_id.trim().is_empty() {
            return Err("empty case_id".into());
        }
        if self.text.trim().is_empty() {
            return Err("empty text".into());
        }
        Ok(())
    }

    /// Per-curiam opinions are stored but carry no attributable stance.
    pub fn is_per_curiam(&self) -> bool {
        self.opinion_type == OpinionType::PerCuriam
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WinningParty {
    Petitioner,
    Respondent,
    Unclear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseMeta {
    pub case_id: String,
    pub winning_party: WinningParty,
    #[serde(default)]
    pub legal_question: Option<String>,
    #[serde(default)]
    pub salience: Option<f64>,
}

impl CaseMeta {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.case_id.trim().is_empty() {
            return Err("empty case_id".into());
        }
        if let Some(s) = self.salience {
            if !s.is_finite() {
                return Err("non-finite salience".into());
            }
        }
        Ok(())
    }

    pub fn question(&self) -> Option<&str> {
        self.legal_question
            .as_deref()
            .filter(|q| !q.trim().is_empty())
    }
}

/// Per-file ingestion outcome.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestOutcome {
    pub source: String,
    pub ingested: usize,
    pub rejected: Vec<LineError>,
}

#[derive(Debug, Default)]
pub struct CorpusBuilder {
    statements: Vec<Statement>,
    opinions: Vec<Opinion>,
    cases: BTreeMap<String, CaseMeta>,
    report: Vec<IngestOutcome>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ingest_transcripts(&mut self, path: &Path) -> Result<usize> {
        let (records, rejected) = io::read_jsonl_with(path, |s: Statement| {
            s.validate()?;
            Ok(s)
        })?;
        Ok(self.record(path, records, rejected, |b, r| b.statements.extend(r)))
    }

    pub fn ingest_opinions(&mut self, path: &Path) -> Result<usize> {
        let (records, rejected) = io::read_jsonl_with(path, |o: Opinion| {
            o.validate()?;
            Ok(o)
        })?;
        Ok(self.record(path, records, rejected, |b, r| b.opinions.extend(r)))
    }

    /// Case metadata. A repeated `case_id` is rejected as a line error.
    pub fn ingest_cases(&mut self, path: &Path) -> Result<usize> {
        let (records, mut rejected) = io::read_jsonl_numbered(path, |c: CaseMeta| {
            c.validate()?;
            Ok(c)
        })?;
        let mut accepted: Vec<CaseMeta> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (line, rec) in records {
            if self.cases.contains_key(&rec.case_id) || !seen.insert(rec.case_id.clone()) {
                rejected.push(LineError {
                    line,
                    message: format!("duplicate case_id {}", rec.case_id),
                });
            } else {
                accepted.push(rec);
            }
        }
        rejected.sort_by_key(|e| e.line);
        Ok(self.record(path, accepted, rejected, |b, r| {
            for c in r {
                b.cases.insert(c.case_id.clone(), c);
            }
        }))
    }

    fn record<T>(
        &mut self,
        path: &Path,
        records: Vec<T>,
        rejected: Vec<LineError>,
        store: impl FnOnce(&mut Self, Vec<T>),
    ) -> usize {
        let n = records.len();
        for err in &rejected {
            log::warn!("{}:{}: rejected: {}", path.display(), err.line, err.message);
        }
        store(self, records);
        self.report.push(IngestOutcome {
            source: path.display().to_string(),
            ingested: n,
            rejected,
        });
        n
    }

    pub fn report(&self) -> &[IngestOutcome] {
        &self.report
    }

    pub fn build(mut self) -> CorpusStore {
        self.statements.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        self.opinions.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        CorpusStore {
            statements: self.statements,
            opinions: self.opinions,
            cases: self.cases,
            report: self.report,
        }
    }
}

/// Immutable, shareable corpus.
#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    statements: Vec<Statement>,
    opinions: Vec<Opinion>,
    cases: BTreeMap<String, CaseMeta>,
    report: Vec<IngestOutcome>,
}

pub const STATEMENTS_FILE: &str = "statements.jsonl";
pub const OPINIONS_FILE: &str = "opinions.jsonl";
pub const CASES_FILE: &str = "cases.jsonl";

impl CorpusStore {
    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn opinions(&self) -> &[Opinion] {
        &self.opinions
    }

    pub fn cases(&self) -> impl Iterator<Item = &CaseMeta> {
        self.cases.values()
    }

    pub fn case(&self, case_id: &str) -> Option<&CaseMeta> {
        self.cases.get(case_id)
    }

    pub fn ingest_report(&self) -> &[IngestOutcome] {
        &self.report
    }

    /// Writes the canonical exports into `dir`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        io::write_jsonl(&dir.join(STATEMENTS_FILE), &self.statements)?;
        io::write_jsonl(&dir.join(OPINIONS_FILE), &self.opinions)?;
        let cases: Vec<&CaseMeta> = self.cases.values().collect();
        io::write_jsonl(&dir.join(CASES_FILE), &cases)
    }

    /// Loads a directory previously written by [`CorpusStore::export`].
    /// Missing files are treated as empty; malformed lines are fatal.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut b = CorpusBuilder::new();
        let files = [STATEMENTS_FILE, OPINIONS_FILE, CASES_FILE];
        for (i, name) in files.iter().enumerate() {
            let path = dir.join(name);
            if !path.exists() {
                continue;
            }
            match i {
                0 => b.ingest_transcripts(&path)?,
                1 => b.ingest_opinions(&path)?,
                _ => b.ingest_cases(&path)?,
            };
            if let Some(err) = b.report.last().and_then(|r| r.rejected.first()) {
                return Err(Error::Parse {
                    path,
                    line: err.line,
                    message: err.message.clone(),
                });
            }
        }
        Ok(b.build())
    }
}
