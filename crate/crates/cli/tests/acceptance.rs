//! One line per acceptance criterion: `[PASS]`, `[FAIL]` or `[N/A]`.
//!
//! Run with `cargo test -p scsl-cli --test acceptance`. Set `SCSL_EXPORTS`
//! to a corpus directory (`opinions.jsonl`, `cases.jsonl`) to also run the
//! majority-baseline check against the published figures.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use scsl_core::corpus::{
    CorpusStore, MetricSeries, OpinionType, WinningParty, AGGREGATE_ENTITY,
};
use scsl_core::dataset::{
    augment_neutral, build_dataset, evaluate, evaluate_labels, infer_stance_label, ner_mask, split, EntitySpan,
    MajorityPredictor, SkipReason, StanceExample, StanceLabel,
};
use scsl_core::metrics::iss;
use scsl_core::numeric;
use scsl_core::scorer::{
    train_mlp, train_scorer, FeatureMatrix, HeadConfig, LabelSchema, LinearModel, LrConfig, MlpConfig, MlpModel,
    SparseVec, StanceScorer, Task,
};
use scsl_core::stats::{
    accuracy_metric, approx_randomization_sampled, approx_randomization_test, macro_f1_metric, pearson, pearson_r,
    responsiveness_partition, PearsonConfig, DEFAULT_PERMUTATIONS,
};
use scsl_core::corpus::TargetSet;

type Check = Result<String, String>;
type Metric = dyn Fn(&[usize], &[usize]) -> f64 + Sync;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Harness {
    failed: usize,
    passed: usize,
}

impl Harness {
    fn run(&mut self, name: &str, budget: Duration, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(Ok(detail)) if elapsed > budget => Err(format!("{detail}; took longer than {budget:?}")),
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => {
                self.passed += 1;
                println!("[PASS] {name} ({secs:.2}s): {detail}");
            }
            Err(why) => {
                self.failed += 1;
                println!("[FAIL] {name} ({secs:.2}s): {why}");
            }
        }
    }

    fn not_applicable(&self, name: &str, why: &str) {
        println!("[N/A]  {name}: {why}");
    }
}

fn label_truth_table() -> Check {
    use OpinionType::*;
    use WinningParty::*;
    let table = [
        (Petitioner, Majority, Ok(StanceLabel::Pro)),
        (Petitioner, Dissenting, Ok(StanceLabel::Con)),
        (Respondent, Majority, Ok(StanceLabel::Con)),
        (Respondent, Dissenting, Ok(StanceLabel::Pro)),
        (Unclear, Majority, Err(SkipReason::UnclearWinner)),
        (Unclear, Dissenting, Err(SkipReason::UnclearWinner)),
        (Petitioner, PerCuriam, Err(SkipReason::PerCuriam)),
        (Respondent, PerCuriam, Err(SkipReason::PerCuriam)),
    ];
    for (w, o, want) in table {
        let got = infer_stance_label(w, o);
        ensure(got == want, || format!("{w:?} x {o:?}: got {got:?}, want {want:?}"))?;
    }
    Ok(format!("{} rows exact", table.len()))
}

/// Deterministic pseudo-scores from a salted FNV hash.
struct HashScorer(u64);

impl HashScorer {
    fn value(&self, parts: &[&str]) -> f64 {
        let mut h = 0xcbf29ce484222325u64 ^ self.0;
        for p in parts {
            for b in p.bytes().chain([0xff]) {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

impl StanceScorer for HashScorer {
    fn score_stance(&self, target: &str, text: &str) -> scsl_core::Result<f64> {
        Ok(self.value(&[target, text]))
    }

    fn score_ideology(&self, text: &str) -> scsl_core::Result<f64> {
        Ok(self.value(&[text]))
    }
}

fn random_words(rng: &mut impl Rng, n: usize) -> String {
    const WORDS: [&str; 12] = [
        "liberty", "court", "tax", "vote", "speech", "search", "union", "market", "order", "rights", "state", "claim",
    ];
    (0..n).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
}

fn iss_antisymmetry() -> Check {
    let mut worst: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = numeric::rng(trial);
        fn side(rng: &mut impl Rng) -> Vec<String> {
            (0..rng.random_range(1..6)).map(|i| format!("{} {i}", random_words(rng, 4))).collect()
        }
        let liberal = side(&mut rng);
        let conservative: Vec<String> = side(&mut rng).into_iter().map(|s| format!("c {s}")).collect();
        let targets = TargetSet::new(liberal, conservative).map_err(|e| e.to_string())?;
        let text = random_words(&mut rng, 12);
        let scorer = HashScorer(rng.random());
        for hic in [true, false] {
            let a = iss(&text, &targets, hic, &scorer).map_err(|e| e.to_string())?;
            let b = iss(&text, &targets.swapped(), hic, &scorer).map_err(|e| e.to_string())?;
            worst = worst.max((a + b).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max |iss + iss_swapped| = {worst:e}"))?;
    Ok(format!("100 triples, max |iss + iss_swapped| = {worst:e}"))
}

const FD_STEP: f64 = 1e-5;

fn max_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
        .fold(0.0, f64::max)
}

fn central_difference(params: &[f64], mut loss: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + FD_STEP;
            let up = loss(&p);
            p[i] = orig - FD_STEP;
            let down = loss(&p);
            p[i] = orig;
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

fn random_features(rng: &mut impl Rng, n: usize, dim: usize, classes: usize) -> (FeatureMatrix, Vec<usize>) {
    let rows = (0..n)
        .map(|_| {
            let dense: Vec<f64> = (0..dim)
                .map(|_| if rng.random_bool(0.6) { rng.random_range(-1.0..1.0) } else { 0.0 })
                .collect();
            SparseVec::from_dense(&dense)
        })
        .collect();
    let labels = (0..n).map(|_| rng.random_range(0..classes)).collect();
    (FeatureMatrix::new(dim, rows).unwrap(), labels)
}

fn schema_for(classes: usize) -> LabelSchema {
    if classes == 2 {
        LabelSchema::stance_binary()
    } else {
        LabelSchema::three_class()
    }
}

fn gradient_checks() -> Check {
    const TRIALS: u64 = 25;
    let (mut lr_worst, mut mlp_worst): (f64, f64) = (0.0, 0.0);
    for trial in 0..TRIALS {
        let mut rng = numeric::rng(0x67ad + trial);
        let classes = 2 + (trial % 2) as usize;
        let dim = rng.random_range(2..8);
        let (x, y) = random_features(&mut rng, 6, dim, classes);

        let mut lr = LinearModel::zeros(schema_for(classes), dim);
        let start: Vec<f64> = lr.params().iter().map(|_| rng.random_range(-1.5..1.5)).collect();
        lr.set_params(&start);
        let l2 = rng.random_range(0.0..0.1);
        let (_, analytic) = lr.loss_and_gradient(&x, &y, l2);
        let mut probe = lr.clone();
        let num = central_difference(&start, |p| {
            probe.set_params(p);
            probe.loss_and_gradient(&x, &y, l2).0
        });
        lr_worst = lr_worst.max(max_rel_error(&analytic, &num));

        let mut mlp = MlpModel::init(schema_for(classes), dim, rng.random_range(2..6), trial).unwrap();
        let start: Vec<f64> = mlp.params().iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        mlp.set_params(&start);
        let (_, analytic) = mlp.loss_and_gradient(&x, &y);
        let mut probe = mlp.clone();
        let num = central_difference(&start, |p| {
            probe.set_params(p);
            probe.loss_and_gradient(&x, &y).0
        });
        mlp_worst = mlp_worst.max(max_rel_error(&analytic, &num));
    }
    ensure(lr_worst < 1e-4 && mlp_worst < 1e-4, || {
        format!("max relative error LR {lr_worst:e}, MLP {mlp_worst:e}")
    })?;
    Ok(format!("{TRIALS} instances each; max relative error LR {lr_worst:e}, MLP {mlp_worst:e}"))
}

fn classical_baselines() -> Check {
    // 200 examples whose stance is carried by disjoint cue vocabularies.
    const PRO: [&str; 4] = ["uphold", "protect", "affirm", "secure"];
    const CON: [&str; 4] = ["reject", "deny", "overturn", "restrict"];
    let mut rng = numeric::rng(200);
    let mut rows = Vec::new();
    for i in 0..200 {
        let label = i % 2;
        let cues = if label == 1 { PRO } else { CON };
        let target = format!("Whether {} ?", random_words(&mut rng, 5));
        let text = format!("{} {} {}", random_words(&mut rng, 6), cues[rng.random_range(0..4)], random_words(&mut rng, 6));
        rows.push((target, text, label));
    }
    let data: Vec<(&str, &str, usize)> = rows.iter().map(|(t, x, l)| (t.as_str(), x.as_str(), *l)).collect();
    let schema = LabelSchema::stance_binary();
    let model = train_scorer(Task::Stance, &schema, &data, 10_000, &HeadConfig::Lr(LrConfig::default()))
        .map_err(|e| e.to_string())?;
    let correct = data
        .iter()
        .filter(|(t, x, l)| model.predict_label(t, x).unwrap() == schema.labels()[*l])
        .count();
    ensure(correct == 200, || format!("LR training accuracy {correct}/200"))?;

    let xor = FeatureMatrix::from_dense(&[
        vec![0.0, 0.0, 1.0],
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
        vec![1.0, 1.0, 1.0],
    ])
    .unwrap();
    let y = [0, 1, 1, 0];
    let seeds = 0..5u64;
    for seed in seeds.clone() {
        let cfg = MlpConfig {
            hidden_dim: 8,
            epochs: 2000,
            learning_rate: 0.5,
            seed,
        };
        let m = train_mlp(&xor, &y, &LabelSchema::binary("a", "b"), &cfg).map_err(|e| e.to_string())?;
        for (row, &label) in xor.rows().iter().zip(&y) {
            let p = m.predict_proba(row).unwrap();
            ensure(usize::from(p[1] > p[0]) == label, || format!("MLP seed {seed} misclassifies XOR: {p:?}"))?;
        }
    }
    Ok(format!("LR 200/200 on separable fixture; MLP solves XOR for seeds {seeds:?}"))
}

/// Majority baseline over 10 seeded 80/20 splits of a user-supplied corpus.
fn majority_on_exports(dir: &Path) -> Check {
    let store = CorpusStore::load(dir).map_err(|e| e.to_string())?;
    let (examples, _) = build_dataset(&store);
    let three = augment_neutral(&examples, scsl_core::dataset::DEFAULT_NEUTRAL_RATIO, 0).map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    for (data, schema, reference) in [
        (&examples, LabelSchema::stance_binary(), 39.6),
        (&three, LabelSchema::three_class(), 20.4),
    ] {
        let mut f1s = Vec::new();
        for seed in 0..10 {
            let s = split(data, 0.8, seed).map_err(|e| e.to_string())?;
            let p = MajorityPredictor::fit(&s.train, &schema).map_err(|e| e.to_string())?;
            f1s.push(100.0 * evaluate(&p, &s.test, &schema).map_err(|e| e.to_string())?.macro_f1);
        }
        let mean = f1s.iter().sum::<f64>() / f1s.len() as f64;
        ensure((mean - reference).abs() <= 3.0, || {
            format!("{}-class majority macro-F1 {mean:.1}, reference {reference}", schema.len())
        })?;
        report.push(format!("{}-class {mean:.1} (ref {reference})", schema.len()));
    }
    Ok(report.join(", "))
}

fn evaluation_oracle() -> Check {
    let mut rng = numeric::rng(1000);
    for case in 0..1000 {
        let k = rng.random_range(2..=3);
        let n = rng.random_range(1..=200);
        let preds: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let golds: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let got = evaluate_labels(&preds, &golds, &schema_for(k)).map_err(|e| e.to_string())?;

        let confusion: Vec<Vec<u64>> = (0..k)
            .map(|g| (0..k).map(|p| (0..n).filter(|&i| golds[i] == g && preds[i] == p).count() as u64).collect())
            .collect();
        let f1: Vec<f64> = (0..k)
            .map(|c| {
                let tp = (0..n).filter(|&i| preds[i] == c && golds[i] == c).count();
                let fp = (0..n).filter(|&i| preds[i] == c && golds[i] != c).count();
                let fneg = (0..n).filter(|&i| preds[i] != c && golds[i] == c).count();
                if tp == 0 {
                    0.0
                } else {
                    (2 * tp) as f64 / (2 * tp + fp + fneg) as f64
                }
            })
            .collect();
        let macro_f1 = f1.iter().sum::<f64>() / k as f64;
        let accuracy = (0..n).filter(|&i| preds[i] == golds[i]).count() as f64 / n as f64;
        ensure(
            got.confusion == confusion && got.per_class_f1 == f1 && got.macro_f1 == macro_f1 && got.accuracy == accuracy,
            || format!("vector {case} disagrees with brute force: {got:?}"),
        )?;
    }
    Ok("1000 vectors exact".into())
}

/// Independent reference for the masking rule, applied token by token.
fn expected_mask(text: &str, spans: &[EntitySpan]) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let s = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let overlaps = |sp: &&EntitySpan| sp.start < i && sp.end > s;
        let token: String = chars[s..i].iter().collect();
        let law = spans.iter().filter(overlaps).any(|sp| sp.entity_type == "LAW");
        let first = spans
            .iter()
            .filter(overlaps)
            .filter(|sp| sp.entity_type != "LAW")
            .min_by_key(|sp| sp.start);
        tokens.push(match first {
            Some(sp) if !law => format!("[{}]", sp.entity_type),
            _ => token,
        });
    }
    tokens
}

fn ner_mask_contract() -> Check {
    const PIECES: [&str; 10] = ["Smith", "v.", "Jones", "§", "1983", "Müller", "naïve", "42", "U.S.C.", "Court,"];
    const GAPS: [&str; 5] = [" ", "  ", "\t", "\n", " \u{a0}"];
    const TYPES: [&str; 5] = ["PERSON", "ORG", "DATE", "LAW", "GPE"];
    let mut rng = numeric::rng(77);
    let mut law_tokens = 0;
    for case in 0..1000 {
        let n = rng.random_range(0..25);
        let mut text = String::new();
        for _ in 0..n {
            text.push_str(GAPS[rng.random_range(0..GAPS.len())]);
            text.push_str(PIECES[rng.random_range(0..PIECES.len())]);
        }
        let len = text.chars().count();
        let mut spans = Vec::new();
        let mut pos = 0;
        while len > 0 && pos < len && rng.random_bool(0.7) {
            let start = rng.random_range(pos..len);
            let end = rng.random_range(start + 1..=len.min(start + 12));
            spans.push(EntitySpan {
                start,
                end,
                entity_type: TYPES[rng.random_range(0..TYPES.len())].into(),
            });
            pos = end;
        }
        spans.shuffle(&mut rng);
        let out = ner_mask(&text, &spans).map_err(|e| format!("case {case}: {e}"))?;
        let got: Vec<&str> = out.split_whitespace().collect();
        ensure(got.len() == text.split_whitespace().count(), || format!("case {case}: token count changed"))?;
        let want = expected_mask(&text, &spans);
        ensure(got == want, || format!("case {case}: {text:?} -> {got:?}, want {want:?}"))?;
        law_tokens += spans.iter().filter(|s| s.entity_type == "LAW").count();
    }
    let date = ner_mask(
        "October 10",
        &[EntitySpan {
            start: 0,
            end: 10,
            entity_type: "DATE".into(),
        }],
    )
    .map_err(|e| e.to_string())?;
    ensure(date == "[DATE] [DATE]", || format!("\"October 10\" -> {date:?}"))?;
    Ok(format!("1000 fuzzed inputs ({law_tokens} LAW spans) match the reference; \"October 10\" -> {date:?}"))
}

fn augment_fixture(n: usize, cases: usize) -> Vec<StanceExample> {
    (0..n)
        .map(|i| StanceExample {
            case_id: format!("case-{}", i % cases),
            target: format!("Whether question {} holds ?", i % cases),
            text: format!("opinion text {i}"),
            label: if i % 3 == 0 { StanceLabel::Con } else { StanceLabel::Pro },
            opinion_type: OpinionType::Majority,
            masked: false,
        })
        .collect()
}

fn neutral_augmentation() -> Check {
    let mut checked = 0;
    for &n in &[10usize, 11, 37, 100, 333, 1000] {
        for &ratio in &[0.0, 0.25, 0.5, 1.0] {
            let input = augment_fixture(n, 2 + n / 7);
            let own: BTreeMap<&str, &str> = input.iter().map(|e| (e.case_id.as_str(), e.target.as_str())).collect();
            let out = augment_neutral(&input, ratio, 42).map_err(|e| e.to_string())?;
            let added = &out[n..];
            let want = (ratio * n as f64).floor() as usize;
            ensure(out[..n] == input[..], || format!("n={n}: input examples changed"))?;
            ensure(added.len() == want, || format!("n={n} ratio={ratio}: {} added, want {want}", added.len()))?;
            for ex in added {
                ensure(ex.label == StanceLabel::Neutral, || "added example not neutral".into())?;
                ensure(own[ex.case_id.as_str()] != ex.target, || {
                    format!("n={n}: neutral example for {} reuses its own question", ex.case_id)
                })?;
                ensure(input.iter().any(|e| e.case_id == ex.case_id && e.text == ex.text), || {
                    "neutral text not taken from its case".into()
                })?;
            }
            ensure(out == augment_neutral(&input, ratio, 42).unwrap(), || "not seed-deterministic".into())?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, ratio) fixtures, n in 10..=1000"))
}

/// Serial enumeration of all 2^n swap patterns.
fn enumerate_swaps(metric: &Metric, a: &[usize], b: &[usize], g: &[usize]) -> f64 {
    let n = g.len();
    let observed = (metric(a, g) - metric(b, g)).abs();
    let mut hits = 0u64;
    for mask in 0..(1u64 << n) {
        let (mut sa, mut sb) = (a.to_vec(), b.to_vec());
        for i in 0..n {
            if mask >> i & 1 == 1 {
                std::mem::swap(&mut sa[i], &mut sb[i]);
            }
        }
        if (metric(&sa, g) - metric(&sb, g)).abs() >= observed - 1e-12 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}

fn statistics_suite() -> Check {
    let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.37 - 4.0).collect();
    let affine: Vec<f64> = xs.iter().map(|x| -2.5 * x + 11.0).collect();
    let r = pearson_r(&xs, &affine).map_err(|e| e.to_string())?;
    ensure((r + 1.0).abs() <= 1e-12, || format!("affine r = {r}"))?;
    let pos: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
    let r_pos = pearson_r(&xs, &pos).map_err(|e| e.to_string())?;
    ensure((r_pos - 1.0).abs() <= 1e-12, || format!("affine r = {r_pos}"))?;
    // Centered x = (-1.5, -0.5, 0.5, 1.5), y = (-1.5, 0.5, -0.5, 1.5): Sxy = 4, Sxx = Syy = 5.
    let hand = pearson_r(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).map_err(|e| e.to_string())?;
    ensure((hand - 0.8).abs() <= 1e-12, || format!("hand-computed case r = {hand}"))?;

    const TRIALS: u64 = 500;
    let mut rejections = 0;
    for trial in 0..TRIALS {
        let mut rng = numeric::rng(numeric::sub_seed(0x5eed, trial));
        let a: Vec<f64> = (0..20).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..20).map(|_| StandardNormal.sample(&mut rng)).collect();
        let res = pearson(&a, &b, &PearsonConfig::permutation(trial)).map_err(|e| e.to_string())?;
        rejections += usize::from(res.p_value < 0.05);
    }
    let rate = rejections as f64 / TRIALS as f64;
    ensure((0.03..=0.08).contains(&rate), || format!("null rejection rate {rate}"))?;

    const ITERATIONS: usize = 10_000;
    let tol = 1.0 / (1.0 + ITERATIONS as f64);
    let f1 = macro_f1_metric(3);
    let mut worst: f64 = 0.0;
    let mut sampled_worst: f64 = 0.0;
    for n in 1..=12 {
        for rep in 0..3u64 {
            let mut rng = numeric::rng(n as u64 * 10 + rep);
            let g: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let a: Vec<usize> = g.iter().map(|&x| if rng.random_bool(0.8) { x } else { rng.random_range(0..3) }).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let metrics: [&Metric; 2] = [&accuracy_metric, &f1];
            for metric in metrics {
                if !(metric(&a, &g) - metric(&b, &g)).is_finite() {
                    continue;
                }
                let exact = enumerate_swaps(metric, &a, &b, &g);
                let got = approx_randomization_test(&|p: &[usize], q: &[usize]| metric(p, q), &a, &b, &g, ITERATIONS, rep)
                    .map_err(|e| e.to_string())?;
                worst = worst.max((got.p_value - exact).abs());
                let sampled =
                    approx_randomization_sampled(&|p: &[usize], q: &[usize]| metric(p, q), &a, &b, &g, ITERATIONS, rep)
                        .map_err(|e| e.to_string())?;
                let sigma = (exact * (1.0 - exact) / ITERATIONS as f64).sqrt().max(tol);
                sampled_worst = sampled_worst.max((sampled.p_value - exact).abs() / sigma);
            }
        }
    }
    ensure(worst <= tol, || format!("randomization vs enumeration max |dp| = {worst:e} > {tol:e}"))?;
    ensure(sampled_worst <= 4.0, || format!("sampled mode deviates {sampled_worst:.2} sigma from enumeration"))?;
    Ok(format!(
        "affine |r| = 1; hand case r = {hand}; null rejection {rate:.3} over {TRIALS} trials x {DEFAULT_PERMUTATIONS} permutations; \
         randomization max |dp| = {worst:e} (sampled mode within {sampled_worst:.2} sigma)"
    ))
}

fn pipeline_determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = common::run_pipeline(a.path(), "2024");
    let second = common::run_pipeline(b.path(), "2024");
    ensure(first.keys().eq(second.keys()), || "different output file sets".into())?;
    let differing: Vec<&String> = first.iter().filter(|(k, v)| second[*k] != **v).map(|(k, _)| k).collect();
    ensure(differing.is_empty(), || format!("differing outputs: {differing:?}"))?;
    Ok(format!("{} output files byte-identical across two roots", first.len()))
}

fn responsiveness_planted() -> Check {
    const YEARS: i32 = 20;
    const INJECTED_R: f64 = 0.95;
    let mut rng = numeric::rng(0xbeef);
    let mut mood = MetricSeries::new("mood");
    let mut level: f64 = 60.0;
    let mut mood_values = Vec::new();
    for y in 0..YEARS {
        level += 2.0 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        mood_values.push(level);
        mood.insert(AGGREGATE_ENTITY, 1990 + y, level).unwrap();
    }
    let m = mood_values.iter().sum::<f64>() / YEARS as f64;
    let sd = (mood_values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / YEARS as f64).sqrt();

    let mut mq = MetricSeries::new("mq");
    let mut planted = BTreeMap::new();
    for j in 0..10 {
        let name = format!("justice{j:02}");
        let tracks = j < 5;
        for (y, v) in mood_values.iter().enumerate() {
            let noise: f64 = StandardNormal.sample(&mut rng);
            let value = if tracks {
                INJECTED_R * (v - m) / sd + (1.0 - INJECTED_R * INJECTED_R).sqrt() * noise
            } else {
                noise
            };
            mq.insert(name.as_str(), 1990 + y as i32, value).unwrap();
        }
        planted.insert(name, tracks);
    }
    let part = responsiveness_partition(&mq, &mood, 0.05, 5, &PearsonConfig::permutation(7));
    let recovered = planted
        .iter()
        .filter(|(j, &tracks)| part.responsive.contains(*j) == tracks && !part.excluded.contains_key(*j))
        .count();
    ensure(recovered >= 9, || format!("{recovered}/10 memberships recovered"))?;
    Ok(format!("{recovered}/10 memberships recovered at alpha = 0.05"))
}

fn main() {
    let mut h = Harness { failed: 0, passed: 0 };
    let s = Duration::from_secs;
    h.run("label-inference truth table", s(1), label_truth_table);
    h.run("ISS antisymmetry", s(1), iss_antisymmetry);
    h.run("gradient checks (LR, MLP)", s(10), gradient_checks);
    h.run("classical baseline sanity", s(30), classical_baselines);
    match std::env::var_os("SCSL_EXPORTS") {
        Some(dir) => h.run("majority baseline vs reference figures", s(120), || majority_on_exports(Path::new(&dir))),
        None => h.not_applicable(
            "majority baseline vs reference figures",
            "needs the original corpus exports (set SCSL_EXPORTS)",
        ),
    }
    h.run("evaluation oracle", s(5), evaluation_oracle);
    h.run("NER-mask contract", s(5), ner_mask_contract);
    h.run("neutral augmentation", s(5), neutral_augmentation);
    h.run("statistics suite", s(60), statistics_suite);
    h.run("pipeline determinism", s(120), pipeline_determinism);
    h.run("responsiveness partition recovers planted structure", s(30), responsiveness_planted);
    h.not_applicable(
        "transformer and full-corpus figures",
        "not reproducible at desk scale: transformer stance scores (62.8, 75.3 F1), \
         transformer and adapter rows (e.g. 55.6 F1), full-corpus correlations (e.g. R = 0.68); \
         covered by the property checks above and the remote-scorer protocol tests",
    );
    println!("acceptance: {} passed, {} failed", h.passed, h.failed);
    if h.failed > 0 {
        std::process::exit(1);
    }
}
