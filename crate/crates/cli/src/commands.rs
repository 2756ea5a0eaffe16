use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use scsl_core::corpus::{
    ingest_metric_table, ColumnMapping, CorpusBuilder, CorpusStore, EmotionLexicon, MetricSeries, OpinionType,
    StatementPool, TargetSet, CASES_FILE, OPINIONS_FILE, STATEMENTS_FILE,
};
use scsl_core::dataset::{
    augment_neutral, build_dataset, evaluate_labels, mask_examples, read_dataset, spans_by_record, split,
    EntitySpan, GazetteerTagger, SpanRecord, StanceExample,
};
use scsl_core::metrics::{self, JusticeYearScore, MetricKind, MetricsConfig, Summary, Which};
use scsl_core::scorer::{
    train_scorer, Convention, HeadConfig, IdeologyExample, LabelSchema, LrConfig, MlpConfig, Task,
};
use scsl_core::stats::{
    self, approx_randomization_test, macro_f1_metric, CaseHps, CorrelationResult, GroupResult, Method, PearsonConfig,
};

use crate::cli::*;
use crate::error::{CliError, CliResult};
use crate::manifest::RunDir;
use crate::scorers;

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    value.as_ref().ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

fn parse<T: std::str::FromStr<Err = scsl_core::Error>>(value: &Option<String>, flag: &str) -> CliResult<T> {
    required(value, flag)?
        .parse()
        .map_err(|e: scsl_core::Error| CliError::usage(format!("--{flag}: {e}")))
}

fn input_dataset(run: &mut RunDir, path: &Path) -> CliResult<Vec<StanceExample>> {
    run.input(path)?;
    Ok(read_dataset(path)?)
}

fn stance_schema(classes: usize) -> CliResult<LabelSchema> {
    match classes {
        2 => Ok(LabelSchema::stance_binary()),
        3 => Ok(LabelSchema::three_class()),
        n => Err(CliError::usage(format!("--classes must be 2 or 3, got {n}"))),
    }
}

fn file_name(path: &str) -> String {
    Path::new(path)
        .file_name()
        .map_or_else(|| path.to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn ingest(run: &mut RunDir, o: &IngestOpts) -> CliResult<()> {
    let mut b = CorpusBuilder::new();
    let sources = [&o.transcripts, &o.opinions, &o.cases];
    if sources.iter().all(|s| s.is_none()) {
        return Err(CliError::usage("give at least one of --transcripts, --opinions, --cases"));
    }
    if let Some(p) = &o.transcripts {
        run.input(p)?;
        b.ingest_transcripts(p)?;
    }
    if let Some(p) = &o.opinions {
        run.input(p)?;
        b.ingest_opinions(p)?;
    }
    if let Some(p) = &o.cases {
        run.input(p)?;
        b.ingest_cases(p)?;
    }
    let store = b.build();
    store.export(&run.path(""))?;
    for name in [STATEMENTS_FILE, OPINIONS_FILE, CASES_FILE] {
        run.adopt(name)?;
    }
    // Source names only, so the report does not depend on where inputs live.
    let mut report = store.ingest_report().to_vec();
    for r in &mut report {
        r.source = file_name(&r.source);
    }
    run.write_json("ingest_report.json", &report)
}

pub fn build_dataset_cmd(run: &mut RunDir, o: &BuildOpts) -> CliResult<()> {
    let dir = required(&o.corpus, "corpus")?;
    run.input(dir)?;
    let store = CorpusStore::load(dir)?;
    let (examples, report) = build_dataset(&store);
    run.write_jsonl("dataset.jsonl", &examples)?;
    run.write_json("build_report.json", &report)
}

pub fn augment(run: &mut RunDir, o: &AugmentOpts) -> CliResult<()> {
    let examples = input_dataset(run, required(&o.dataset, "dataset")?)?;
    let out = augment_neutral(&examples, o.ratio.unwrap_or_default(), run.seed())?;
    run.write_jsonl("augmented.jsonl", &out)
}

fn load_spans(
    run: &mut RunDir,
    spans: &Option<PathBuf>,
    examples: &[StanceExample],
) -> CliResult<Option<BTreeMap<usize, Vec<EntitySpan>>>> {
    let Some(path) = spans else { return Ok(None) };
    run.input(path)?;
    let records: Vec<SpanRecord> = scsl_core::io::read_jsonl(path)?;
    Ok(Some(spans_by_record(&records, examples)?))
}

/// With a span file the spans are authoritative; otherwise the built-in tagger runs.
fn mask_all(examples: &[StanceExample], spans: Option<BTreeMap<usize, Vec<EntitySpan>>>) -> CliResult<Vec<StanceExample>> {
    Ok(match spans {
        Some(s) => mask_examples(examples, &s, None)?,
        None => mask_examples(examples, &BTreeMap::new(), Some(&GazetteerTagger))?,
    })
}

pub fn mask(run: &mut RunDir, o: &MaskOpts) -> CliResult<()> {
    let examples = input_dataset(run, required(&o.dataset, "dataset")?)?;
    let spans = load_spans(run, &o.spans, &examples)?;
    let masked = mask_all(&examples, spans)?;
    run.write_jsonl("masked.jsonl", &masked)
}

#[derive(Serialize)]
struct SplitReport {
    seed: u64,
    fraction: f64,
    masked_train: bool,
    train: usize,
    test: usize,
}

pub fn split_cmd(run: &mut RunDir, o: &SplitOpts) -> CliResult<()> {
    let examples = input_dataset(run, required(&o.dataset, "dataset")?)?;
    let fraction = o.fraction.unwrap_or_default();
    let plain = split(&examples, fraction, run.seed())?;
    let train = if o.mask == Some(true) {
        let spans = load_spans(run, &o.spans, &examples)?;
        // Same seed and length give the same permutation, so the masked
        // training side holds exactly the examples of the plain one.
        split(&mask_all(&examples, spans)?, fraction, run.seed())?.train
    } else {
        plain.train
    };
    run.write_jsonl("train.jsonl", &train)?;
    run.write_jsonl("test.jsonl", &plain.test)?;
    let report = SplitReport {
        seed: run.seed(),
        fraction,
        masked_train: o.mask == Some(true),
        train: train.len(),
        test: plain.test.len(),
    };
    run.write_json("split_report.json", &report)
}

#[derive(Serialize)]
struct TrainReport {
    task: Task,
    model: String,
    labels: Vec<String>,
    examples: usize,
    skipped_neutral: usize,
    vocabulary: usize,
    train_accuracy: f64,
    train_macro_f1: f64,
}

pub fn train(run: &mut RunDir, o: &TrainOpts) -> CliResult<()> {
    let data_path = required(&o.data, "data")?.clone();
    let task = match required(&o.task, "task")?.as_str() {
        "stance" => Task::Stance,
        "ideology" => Task::Ideology,
        t => return Err(CliError::usage(format!("--task must be stance or ideology, got {t:?}"))),
    };
    let classes = o.classes.unwrap_or(2);
    let head = match required(&o.model, "model")?.as_str() {
        "lr" => HeadConfig::Lr(LrConfig {
            epochs: o.epochs.unwrap_or_default(),
            learning_rate: o.learning_rate.unwrap_or_default(),
            l2: o.l2.unwrap_or_default(),
        }),
        "mlp" => HeadConfig::Mlp(MlpConfig {
            hidden_dim: o.hidden.unwrap_or_default(),
            epochs: o.epochs.unwrap_or_default(),
            learning_rate: o.learning_rate.unwrap_or_default(),
            seed: run.seed(),
        }),
        m => return Err(CliError::usage(format!("--model must be lr or mlp, got {m:?}"))),
    };
    run.input(&data_path)?;
    let (schema, rows, skipped_neutral) = match task {
        Task::Stance => {
            let schema = stance_schema(classes)?;
            let examples = read_dataset(&data_path)?;
            let mut skipped = 0;
            let mut rows = Vec::new();
            for ex in examples {
                match schema.index_of(ex.label.as_str()) {
                    Some(i) => rows.push((ex.target, ex.text, i)),
                    None => skipped += 1,
                }
            }
            (schema, rows, skipped)
        }
        Task::Ideology => {
            if classes != 2 {
                return Err(CliError::usage("ideology models are binary; use --classes 2"));
            }
            let schema = LabelSchema::ideology();
            let examples: Vec<IdeologyExample> = scsl_core::io::read_jsonl(&data_path)?;
            let mut rows = Vec::new();
            for (line, ex) in examples.into_iter().enumerate() {
                let i = schema.index_of(&ex.label).ok_or_else(|| scsl_core::Error::Parse {
                    path: data_path.clone(),
                    line: line + 1,
                    message: format!("label {:?} not in {:?}", ex.label, schema.labels()),
                })?;
                rows.push((String::new(), ex.text, i));
            }
            (schema, rows, 0)
        }
    };
    let triples: Vec<(&str, &str, usize)> = rows.iter().map(|(t, x, i)| (t.as_str(), x.as_str(), *i)).collect();
    let model = train_scorer(task, &schema, &triples, o.max_vocab.unwrap_or_default(), &head)?;

    let preds = triples
        .par_iter()
        .map(|(t, x, _)| model.predict_label(t, x).map(|l| schema.index_of(l).expect("model label in schema")))
        .collect::<scsl_core::Result<Vec<usize>>>()?;
    let golds: Vec<usize> = triples.iter().map(|r| r.2).collect();
    let fit = evaluate_labels(&preds, &golds, &schema)?;

    let name = match task {
        Task::Stance => "stance.scsl",
        Task::Ideology => "ideology.scsl",
    };
    run.write(name, &model.to_bytes()?)?;
    let report = TrainReport {
        task,
        model: o.model.clone().unwrap_or_default(),
        labels: schema.labels().to_vec(),
        examples: triples.len(),
        skipped_neutral,
        vocabulary: model.vocab.len(),
        train_accuracy: fit.accuracy,
        train_macro_f1: fit.macro_f1,
    };
    run.write_json("train_report.json", &report)
}

#[derive(Serialize)]
struct EvalReport {
    scorer: String,
    /// Test examples whose gold label lies outside the evaluated classes.
    skipped: usize,
    #[serde(flatten)]
    evaluation: scsl_core::dataset::Evaluation,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<Comparison>,
}

#[derive(Serialize)]
struct Comparison {
    scorer: String,
    macro_f1: f64,
    accuracy: f64,
    metric: &'static str,
    test: stats::RandomizationResult,
    seed: u64,
}

fn predictions(
    predictor: &dyn scsl_core::dataset::Predictor,
    test: &[StanceExample],
    schema: &LabelSchema,
) -> CliResult<Vec<usize>> {
    let labels = test
        .par_iter()
        .map(|ex| predictor.predict(&ex.target, &ex.text))
        .collect::<scsl_core::Result<Vec<String>>>()?;
    labels
        .iter()
        .map(|l| {
            schema
                .index_of(l)
                .ok_or_else(|| scsl_core::Error::Scorer(format!("predicted label {l:?} outside {:?}", schema.labels())).into())
        })
        .collect()
}

pub fn eval(run: &mut RunDir, o: &EvalOpts) -> CliResult<()> {
    let schema = stance_schema(o.classes.unwrap_or(2))?;
    let all = input_dataset(run, required(&o.test, "test")?)?;
    let total = all.len();
    let test: Vec<StanceExample> = all
        .into_iter()
        .filter(|ex| schema.index_of(ex.label.as_str()).is_some())
        .collect();
    if test.is_empty() {
        return Err(CliError::usage("no test examples with an evaluated label"));
    }
    let golds: Vec<usize> = test
        .iter()
        .map(|ex| schema.index_of(ex.label.as_str()).expect("filtered above"))
        .collect();
    let token_limit = o.token_limit.unwrap_or(scsl_core::dataset::DEFAULT_TOKEN_LIMIT);

    let spec = required(&o.scorer, "scorer")?;
    let primary = scorers::stance_predictor(run, spec, &schema, token_limit)?;
    let preds = predictions(primary.as_ref(), &test, &schema)?;
    let evaluation = evaluate_labels(&preds, &golds, &schema)?;

    let comparison = match &o.compare_scorer {
        None => None,
        Some(other) => {
            let second = scorers::stance_predictor(run, other, &schema, token_limit)?;
            let preds_b = predictions(second.as_ref(), &test, &schema)?;
            let eval_b = evaluate_labels(&preds_b, &golds, &schema)?;
            let metric = macro_f1_metric(schema.len());
            let iterations = o.iterations.unwrap_or_default();
            let test = approx_randomization_test(&metric, &preds, &preds_b, &golds, iterations, run.seed())?;
            Some(Comparison {
                scorer: other.clone(),
                macro_f1: eval_b.macro_f1,
                accuracy: eval_b.accuracy,
                metric: "macro_f1",
                test,
                seed: run.seed(),
            })
        }
    };
    let report = EvalReport {
        scorer: spec.clone(),
        skipped: total - test.len(),
        evaluation,
        comparison,
    };
    run.write_json("eval_report.json", &report)
}

pub fn metrics_cmd(run: &mut RunDir, o: &MetricsOpts) -> CliResult<()> {
    let which: Which = match required(&o.which, "which")?.as_str() {
        "iss" => Which::Iss,
        "hps" => Which::Hps,
        "both" => Which::Both,
        w => return Err(CliError::usage(format!("--which must be iss, hps or both, got {w:?}"))),
    };
    let need_iss = which != Which::Hps;
    let need_hps = which != Which::Iss;
    let convention: Convention = parse(&o.convention, "convention")?;
    let n = o.n.unwrap_or_default();
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let targets = match &o.targets {
        Some(p) => {
            run.input(p)?;
            TargetSet::load(p)?
        }
        None if need_iss => return Err(CliError::usage("ISS needs --targets")),
        None => TargetSet::default(),
    };
    let corpus = required(&o.corpus, "corpus")?;
    let lexicon_path = required(&o.lexicon, "lexicon")?;
    run.input(corpus)?;
    run.input(lexicon_path)?;
    let scorer = scorers::metric_scorer(run, &o.scorer, convention, need_iss, need_hps)?;
    let store = CorpusStore::load(corpus)?;
    let lexicon = EmotionLexicon::load(lexicon_path)?;
    let pool = StatementPool::new(&store, &lexicon)?;

    let hic = o.higher_is_conservative.unwrap_or(true);
    let cfg = MetricsConfig {
        higher_is_conservative: hic,
        sample_size: n,
        min_statements: o.min_statements.unwrap_or_default(),
        ..MetricsConfig::new(targets, which)
    };
    let scores = metrics::all_justice_year_scores(&pool, run.seed(), &cfg, scorer.as_ref())?;
    run.write_jsonl("justice_year_scores.jsonl", &scores)?;

    if need_hps {
        let cases = case_hps(&store, scorer.as_ref(), hic)?;
        run.write_jsonl("case_hps.jsonl", &cases)?;
    }
    Ok(())
}

/// Mean HPS over each case's majority and per-curiam opinions.
fn case_hps(
    store: &CorpusStore,
    scorer: &dyn scsl_core::scorer::StanceScorer,
    hic: bool,
) -> CliResult<Vec<CaseHps>> {
    let opinions: Vec<_> = store
        .opinions()
        .iter()
        .filter(|op| matches!(op.opinion_type, OpinionType::Majority | OpinionType::PerCuriam))
        .collect();
    let scores = opinions
        .par_iter()
        .map(|op| metrics::hps(&op.text, scorer, hic))
        .collect::<scsl_core::Result<Vec<f64>>>()?;
    let mut by_case: BTreeMap<(&str, i32), Vec<f64>> = BTreeMap::new();
    for (op, s) in opinions.iter().zip(scores) {
        by_case.entry((&op.case_id, op.year)).or_default().push(s);
    }
    Ok(by_case
        .into_iter()
        .filter_map(|((case_id, year), v)| {
            scsl_core::numeric::mean(&v).map(|hps| CaseHps {
                case_id: case_id.to_string(),
                year,
                hps,
            })
        })
        .collect())
}

fn metric_table(run: &mut RunDir, path: &Path, name: &str, mapping: ColumnMapping) -> CliResult<MetricSeries> {
    run.input(path)?;
    let table = ingest_metric_table(path, name, &mapping)?;
    if !table.rejected.is_empty() {
        log::warn!("{}: {} row(s) rejected", path.display(), table.rejected.len());
    }
    Ok(table.series)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

struct Tsv(String);

impl Tsv {
    fn new(header: &[&str]) -> Self {
        Tsv(header.join("\t") + "\n")
    }

    fn row(&mut self, cells: &[String]) {
        self.0.push_str(&cells.join("\t"));
        self.0.push('\n');
    }

    fn result(&mut self, group: String, n: usize, r: Option<&CorrelationResult>, method: Method) {
        self.row(&[
            group,
            fmt_opt(r.map(|r| r.r)),
            fmt_opt(r.map(|r| r.p_value)),
            n.to_string(),
            method.to_string(),
            r.and_then(|r| r.seed).map_or_else(|| "NA".into(), |s| s.to_string()),
        ]);
    }
}

pub fn analyze(run: &mut RunDir, o: &AnalyzeOpts) -> CliResult<()> {
    let method: Method = parse(&o.method, "method")?;
    let summary = match required(&o.summary, "summary")?.as_str() {
        "mean" => Summary::Mean,
        "median" => Summary::Median,
        s => return Err(CliError::usage(format!("--summary must be mean or median, got {s:?}"))),
    };
    let cfg = match method {
        Method::Permutation => PearsonConfig {
            permutations: o.permutations.unwrap_or_default(),
            ..PearsonConfig::permutation(run.seed())
        },
        Method::TApprox => PearsonConfig::t_approx(),
    };
    let alpha = o.alpha.unwrap_or_default();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::usage("--alpha must lie in (0, 1)"));
    }
    let col = |v: &Option<String>| v.clone().unwrap_or_default();

    let scores_path = required(&o.scores, "scores")?;
    run.input(scores_path)?;
    let scores: Vec<JusticeYearScore> = scsl_core::io::read_jsonl(scores_path)?;
    let mq = metric_table(
        run,
        required(&o.mq, "mq")?,
        "mq",
        ColumnMapping {
            entity: Some(col(&o.mq_entity)),
            year: col(&o.mq_year),
            value: col(&o.mq_value),
        },
    )?;
    let mood = metric_table(
        run,
        required(&o.mood, "mood")?,
        "mood",
        ColumnMapping {
            entity: None,
            year: col(&o.mood_year),
            value: col(&o.mood_value),
        },
    )?;

    let partition = stats::responsiveness_partition(&mq, &mood, alpha, o.min_years.unwrap_or_default(), &cfg);
    let mut table = Tsv::new(&["group", "r", "p", "n", "method", "seed"]);
    let mut resp_plot = Tsv::new(&["justice", "year", "mq", "mood", "responsive"]);
    for (j, res) in &partition.results {
        table.result(format!("responsiveness:{j}"), res.n, Some(res), method);
        let aligned = stats::align_series(&mq, &mood, j, scsl_core::corpus::AGGREGATE_ENTITY)?;
        for ((y, x), m) in aligned.years.iter().zip(&aligned.xs).zip(&aligned.ys) {
            resp_plot.row(&[
                j.clone(),
                y.to_string(),
                x.to_string(),
                m.to_string(),
                partition.responsive.contains(j).to_string(),
            ]);
        }
    }

    let mut grouped = BTreeMap::new();
    for kind in [MetricKind::Iss, MetricKind::Hps] {
        if !scores.iter().any(|s| kind.of(s).is_some()) {
            continue;
        }
        let name = match kind {
            MetricKind::Iss => "iss",
            MetricKind::Hps => "hps",
        };
        let g = stats::grouped_ideology_correlation(&scores, kind, &mq, &partition, summary, &cfg);
        let mut plot = Tsv::new(&["group", "justice", name, "mq"]);
        for (label, gr) in [("responsive", &g.responsive), ("nonresponsive", &g.nonresponsive)] {
            group_rows(&mut table, &mut plot, name, label, gr, method);
        }
        run.write(&format!("plot_{name}_vs_mq.tsv"), plot.0.as_bytes())?;
        grouped.insert(name, g);
    }

    let salience = match (&o.salience, &o.case_hps) {
        (Some(sal), Some(ch)) => {
            let series = metric_table(
                run,
                sal,
                "salience",
                ColumnMapping {
                    entity: Some(col(&o.salience_entity)),
                    year: col(&o.salience_year),
                    value: col(&o.salience_value),
                },
            )?;
            run.input(ch)?;
            let cases: Vec<CaseHps> = scsl_core::io::read_jsonl(ch)?;
            let report = stats::salience_politicality(&cases, &series, o.by_year.unwrap_or(true), &cfg);
            let mut plot = Tsv::new(&["year", "case_id", "abs_hps", "salience"]);
            for yc in &report.correlations {
                let label = yc.year.map_or_else(|| "all".into(), |y| y.to_string());
                table.result(format!("salience:{label}"), yc.result.n, Some(&yc.result), method);
                for (case, h, s) in &yc.points {
                    plot.row(&[label.clone(), case.clone(), h.to_string(), s.to_string()]);
                }
            }
            run.write("plot_salience.tsv", plot.0.as_bytes())?;
            Some(report)
        }
        (None, None) => None,
        _ => return Err(CliError::usage("--salience and --case-hps go together")),
    };

    run.write("analysis.tsv", table.0.as_bytes())?;
    run.write("plot_responsiveness.tsv", resp_plot.0.as_bytes())?;
    run.write_json("partition.json", &partition)?;
    run.write_json("grouped.json", &grouped)?;
    if let Some(report) = salience {
        run.write_json("salience.json", &report)?;
    }
    Ok(())
}

fn group_rows(table: &mut Tsv, plot: &mut Tsv, metric: &str, label: &str, g: &GroupResult, method: Method) {
    table.result(format!("{metric}:{label}"), g.points.len(), g.result.as_ref(), method);
    if let Some(flag) = &g.flag {
        log::warn!("{metric} {label} group: {flag}");
    }
    for (j, x, y) in &g.points {
        plot.row(&[label.to_string(), j.clone(), x.to_string(), y.to_string()]);
    }
}

