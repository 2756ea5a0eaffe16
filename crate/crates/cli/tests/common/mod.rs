#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const FIXTURE_FILES: [&str; 9] = [
    "transcripts.jsonl",
    "opinions.jsonl",
    "cases.jsonl",
    "lexicon.tsv",
    "targets.toml",
    "mq.csv",
    "mood.csv",
    "salience.csv",
    "ideology_train.jsonl",
];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Runs the binary with `cwd` as working directory.
pub fn scsl(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scsl"))
        .current_dir(cwd)
        .args(args)
        .env("SCSL_LOG", "error")
        .output()
        .expect("spawn scsl")
}

pub fn scsl_ok(cwd: &Path, args: &[&str]) -> Output {
    let out = scsl(cwd, args);
    assert!(
        out.status.success(),
        "scsl {args:?} failed with {:?}\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Copies the fixture corpus into `root/in`.
pub fn stage_fixtures(root: &Path) {
    let dst = root.join("in");
    std::fs::create_dir_all(&dst).unwrap();
    for f in FIXTURE_FILES {
        std::fs::copy(fixtures().join(f), dst.join(f)).unwrap();
    }
}

/// Every file below `dir`, keyed by its path relative to `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                let rel = p.strip_prefix(base).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// Full pipeline on the staged fixtures with relative paths, so two roots
/// produce comparable outputs. Returns the snapshot of `root/out`.
pub fn run_pipeline(root: &Path, seed: &str) -> BTreeMap<String, Vec<u8>> {
    stage_fixtures(root);
    let steps: Vec<Vec<&str>> = vec![
        vec!["ingest", "--out", "out/corpus", "--transcripts", "in/transcripts.jsonl", "--opinions", "in/opinions.jsonl", "--cases", "in/cases.jsonl"],
        vec!["build-dataset", "--out", "out/dataset", "--corpus", "out/corpus"],
        vec!["augment", "--out", "out/augment", "--dataset", "out/dataset/dataset.jsonl", "--ratio", "0.5"],
        vec!["mask", "--out", "out/mask", "--dataset", "out/augment/augmented.jsonl"],
        vec!["split", "--out", "out/split", "--dataset", "out/augment/augmented.jsonl", "--mask"],
        vec!["train", "--out", "out/model", "--data", "out/split/train.jsonl", "--task", "stance", "--model", "lr", "--classes", "3"],
        vec!["train", "--out", "out/model", "--data", "in/ideology_train.jsonl", "--task", "ideology", "--model", "lr"],
        vec![
            "eval", "--out", "out/eval", "--test", "out/split/test.jsonl", "--classes", "3",
            "--scorer", "builtin:out/model/stance.scsl", "--compare-scorer", "majority:out/split/train.jsonl",
            "--iterations", "2000",
        ],
        vec![
            "metrics", "--out", "out/metrics", "--corpus", "out/corpus", "--lexicon", "in/lexicon.tsv",
            "--targets", "in/targets.toml", "--scorer", "builtin:out/model/ideology.scsl", "--n", "25",
            "--which", "hps",
        ],
        vec![
            "analyze", "--out", "out/analysis", "--scores", "out/metrics/justice_year_scores.jsonl",
            "--mq", "in/mq.csv", "--mood", "in/mood.csv", "--salience", "in/salience.csv",
            "--case-hps", "out/metrics/case_hps.jsonl", "--permutations", "2000",
        ],
    ];
    for step in steps {
        let mut args = step.clone();
        args.extend(["--seed", seed]);
        scsl_ok(root, &args);
    }
    snapshot(&root.join("out"))
}
