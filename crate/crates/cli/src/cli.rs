use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "scsl", version, about = "Stance and ideology analysis of court language")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Validate raw transcript, opinion and case exports into a corpus directory
    Ingest(Run<IngestOpts>),
    /// Pair opinions with their case's question and infer stance labels
    BuildDataset(Run<BuildOpts>),
    /// Append neutral examples built from unrelated questions
    Augment(Run<AugmentOpts>),
    /// Replace named-entity tokens with their entity type
    Mask(Run<MaskOpts>),
    /// Seeded train/test split; optionally masks the training side
    Split(Run<SplitOpts>),
    /// Train a tf-idf classifier for stance or ideology
    Train(Run<TrainOpts>),
    /// Score a predictor on a test split, optionally against a second one
    Eval(Run<EvalOpts>),
    /// Per justice-year ISS and HPS from oral-argument statements
    Metrics(Run<MetricsOpts>),
    /// Correlation analyses against external ideology and mood series
    Analyze(Run<AnalyzeOpts>),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::BuildDataset(_) => "build-dataset",
            Command::Augment(_) => "augment",
            Command::Mask(_) => "mask",
            Command::Split(_) => "split",
            Command::Train(_) => "train",
            Command::Eval(_) => "eval",
            Command::Metrics(_) => "metrics",
            Command::Analyze(_) => "analyze",
        }
    }
}

#[derive(Debug, Args)]
pub struct Run<T: Args> {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub opts: T,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed for every random choice in the run
    #[arg(long)]
    pub seed: u64,
    /// Output directory (created if missing)
    #[arg(long)]
    pub out: PathBuf,
    /// TOML file whose [<subcommand>] table supplies option defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available cores)
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Options of one subcommand. Every field is optional on the command line;
/// `fill_defaults` supplies whatever neither flags nor config file set.
pub trait Opts: Serialize + for<'de> Deserialize<'de> + Clone {
    /// Folds flag-only switches into serializable fields before merging.
    fn normalize_flags(&mut self) {}

    fn fill_defaults(&mut self);
}

macro_rules! opts {
    ($(#[$m:meta])* $name:ident { $($body:tt)* }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name { $($body)* }
    };
}

opts!(IngestOpts {
    /// Oral-argument statements (JSONL)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcripts: Option<PathBuf>,
    /// Written opinions (JSONL)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opinions: Option<PathBuf>,
    /// Case metadata with legal questions (JSONL)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cases: Option<PathBuf>,
});

impl Opts for IngestOpts {
    fn fill_defaults(&mut self) {}
}

opts!(BuildOpts {
    /// Corpus directory written by `ingest`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
});

impl Opts for BuildOpts {
    fn fill_defaults(&mut self) {}
}

opts!(AugmentOpts {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// Neutral examples to add, as a fraction of the input size
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
});

impl Opts for AugmentOpts {
    fn fill_defaults(&mut self) {
        self.ratio.get_or_insert(scsl_core::dataset::DEFAULT_NEUTRAL_RATIO);
    }
}

opts!(MaskOpts {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// Entity span file; without it the built-in tagger is used
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spans: Option<PathBuf>,
});

impl Opts for MaskOpts {
    fn fill_defaults(&mut self) {}
}

opts!(SplitOpts {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// Share of examples that go to the training side
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    /// Mask entities in the training side (default)
    #[arg(long, num_args = 0..=1, default_missing_value = "true", action = ArgAction::Set, conflicts_with = "no_mask")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<bool>,
    /// Leave the training side unmasked
    #[arg(long = "no-mask")]
    #[serde(skip)]
    pub no_mask: bool,
    /// Entity span file for masking; without it the built-in tagger is used
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spans: Option<PathBuf>,
});

impl Opts for SplitOpts {
    fn normalize_flags(&mut self) {
        if self.no_mask {
            self.mask = Some(false);
        }
    }

    fn fill_defaults(&mut self) {
        self.fraction.get_or_insert(0.8);
        self.mask.get_or_insert(true);
    }
}

opts!(TrainOpts {
    /// Training data: dataset records, or `{text, label}` lines for ideology
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// stance | ideology
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    /// lr | mlp
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// 2 (pro/con) or 3 (adds neutral); ideology is always 2
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    /// L2 penalty (logistic regression only)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2: Option<f64>,
    /// Hidden units (MLP only)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_vocab: Option<usize>,
});

impl Opts for TrainOpts {
    fn fill_defaults(&mut self) {
        use scsl_core::scorer::{LrConfig, MlpConfig, DEFAULT_MAX_VOCAB};
        self.task.get_or_insert_with(|| "stance".into());
        let model = self.model.get_or_insert_with(|| "lr".into()).clone();
        self.classes.get_or_insert(2);
        self.max_vocab.get_or_insert(DEFAULT_MAX_VOCAB);
        if model == "mlp" {
            let d = MlpConfig::default();
            self.epochs.get_or_insert(d.epochs);
            self.learning_rate.get_or_insert(d.learning_rate);
            self.hidden.get_or_insert(d.hidden_dim);
        } else {
            let d = LrConfig::default();
            self.epochs.get_or_insert(d.epochs);
            self.learning_rate.get_or_insert(d.learning_rate);
            self.l2.get_or_insert(d.l2);
        }
    }
}

opts!(EvalOpts {
    /// Test split (dataset records)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    /// builtin:<model> | remote:<url> | majority:<train file>
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scorer: Option<String>,
    /// Second predictor, compared by approximate randomization on macro-F1
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare_scorer: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    /// Randomization-test iterations
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Whitespace-token limit for `question [SEP] opinion` sent to remote scorers
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token_limit: Option<usize>,
});

impl Opts for EvalOpts {
    fn fill_defaults(&mut self) {
        self.classes.get_or_insert(2);
        self.iterations.get_or_insert(10_000);
        self.token_limit.get_or_insert(scsl_core::dataset::DEFAULT_TOKEN_LIMIT);
    }
}

opts!(MetricsOpts {
    /// Corpus directory written by `ingest`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    /// Emotion lexicon (word, emotion, flag) TSV
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    /// Liberal/conservative target statements (TOML or JSON)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<PathBuf>,
    /// builtin:<model> (repeatable, one per task) | remote:<url>
    #[arg(long)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scorer: Vec<String>,
    /// Statements sampled per justice-year
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// signed_predicted | expectation
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    /// iss | hps | both
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
    /// Justice-years with fewer filtered statements are flagged
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_statements: Option<usize>,
    /// Sign so that positive scores mean conservative
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub higher_is_conservative: Option<bool>,
});

impl Opts for MetricsOpts {
    fn fill_defaults(&mut self) {
        use scsl_core::metrics::{DEFAULT_MIN_STATEMENTS, DEFAULT_SAMPLE_SIZE};
        self.n.get_or_insert(DEFAULT_SAMPLE_SIZE);
        self.convention.get_or_insert_with(|| "signed_predicted".into());
        let default_which = if self.targets.is_some() { "both" } else { "hps" };
        self.which.get_or_insert_with(|| default_which.into());
        self.min_statements.get_or_insert(DEFAULT_MIN_STATEMENTS);
        self.higher_is_conservative.get_or_insert(true);
    }
}

opts!(AnalyzeOpts {
    /// justice_year_scores.jsonl written by `metrics`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<PathBuf>,
    /// Yearly ideal points per justice (CSV)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mq: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mq_entity: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mq_year: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mq_value: Option<String>,
    /// Yearly public mood (CSV)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mood: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mood_year: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mood_value: Option<String>,
    /// Case salience (CSV); needs --case-hps
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub salience: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub salience_entity: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub salience_year: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub salience_value: Option<String>,
    /// case_hps.jsonl written by `metrics`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_hps: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_years: Option<usize>,
    /// permutation | t_approx
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<usize>,
    /// mean | median tenure summary
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    /// Correlate salience per year (true) or pooled (false)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub by_year: Option<bool>,
});

impl Opts for AnalyzeOpts {
    fn fill_defaults(&mut self) {
        use scsl_core::stats::{DEFAULT_ALPHA, DEFAULT_MIN_YEARS, DEFAULT_PERMUTATIONS};
        let s = |v: &mut Option<String>, d: &str| {
            v.get_or_insert_with(|| d.to_string());
        };
        s(&mut self.mq_entity, "justiceName");
        s(&mut self.mq_year, "term");
        s(&mut self.mq_value, "post_mn");
        s(&mut self.mood_year, "year");
        s(&mut self.mood_value, "mood");
        s(&mut self.salience_entity, "case_id");
        s(&mut self.salience_year, "term");
        s(&mut self.salience_value, "salience");
        s(&mut self.method, "permutation");
        s(&mut self.summary, "mean");
        self.alpha.get_or_insert(DEFAULT_ALPHA);
        self.min_years.get_or_insert(DEFAULT_MIN_YEARS);
        self.permutations.get_or_insert(DEFAULT_PERMUTATIONS);
        self.by_year.get_or_insert(true);
    }
}
