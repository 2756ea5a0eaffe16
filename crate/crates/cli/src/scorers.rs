use std::path::{Path, PathBuf};

use scsl_core::dataset::{read_dataset, truncate_text, MajorityPredictor, Predictor};
use scsl_core::scorer::{
    BuiltinScorer, Convention, LabelSchema, RemoteConfig, RemoteScorer, ScoreMode, ScoreRequest, ScorerModel,
    StanceScorer, Task,
};
use scsl_core::Error;

use crate::error::{CliError, CliResult};
use crate::manifest::RunDir;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScorerSpec {
    Builtin(PathBuf),
    Remote(String),
    Majority(PathBuf),
}

impl std::str::FromStr for ScorerSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.split_once(':') {
            Some(("builtin", p)) if !p.is_empty() => Ok(ScorerSpec::Builtin(p.into())),
            Some(("remote", u)) if !u.is_empty() => Ok(ScorerSpec::Remote(u.to_string())),
            Some(("majority", p)) if !p.is_empty() => Ok(ScorerSpec::Majority(p.into())),
            _ => Err(CliError::usage(format!(
                "scorer spec {s:?}: expected builtin:<model>, remote:<url> or majority:<train file>"
            ))),
        }
    }
}

fn load_model(run: &mut RunDir, path: &Path) -> CliResult<ScorerModel> {
    run.input(path)?;
    Ok(ScorerModel::load(path)?)
}

/// Scorer for the metrics pipeline: either one remote endpoint or a set of
/// built-in models, at most one per task.
pub fn metric_scorer(
    run: &mut RunDir,
    specs: &[String],
    convention: Convention,
    need_stance: bool,
    need_ideology: bool,
) -> CliResult<Box<dyn StanceScorer>> {
    let specs = specs.iter().map(|s| s.parse()).collect::<CliResult<Vec<ScorerSpec>>>()?;
    match specs.as_slice() {
        [] => Err(CliError::usage("--scorer is required")),
        [ScorerSpec::Remote(url)] => {
            let remote = RemoteScorer::new(url, RemoteConfig::default())?;
            remote.health()?;
            Ok(Box::new(remote))
        }
        _ => {
            let mut scorer = BuiltinScorer::new(convention);
            for spec in &specs {
                let ScorerSpec::Builtin(path) = spec else {
                    return Err(CliError::usage("metrics takes one remote scorer or builtin models only"));
                };
                let model = load_model(run, path)?;
                let slot = match model.task {
                    Task::Stance => &scorer.stance,
                    Task::Ideology => &scorer.ideology,
                };
                if slot.is_some() {
                    return Err(CliError::usage(format!("two {:?} models given", model.task)));
                }
                scorer = scorer.with_model(model);
            }
            if need_stance && scorer.stance.is_none() {
                return Err(CliError::usage("ISS needs a stance model (builtin:<stance model>)"));
            }
            if need_ideology && scorer.ideology.is_none() {
                return Err(CliError::usage("HPS needs an ideology model (builtin:<ideology model>)"));
            }
            Ok(Box::new(scorer))
        }
    }
}

/// Remote stance classifier answering with a label.
struct RemotePredictor {
    scorer: RemoteScorer,
    token_limit: usize,
}

impl Predictor for RemotePredictor {
    fn predict(&self, target: &str, text: &str) -> scsl_core::Result<String> {
        let body = truncate_text(target, text, self.token_limit)?;
        let resp = self.scorer.request(&ScoreRequest {
            text: body.into_owned(),
            target: Some(target.to_string()),
            mode: ScoreMode::Stance,
        })?;
        if resp.label.is_empty() {
            return Err(Error::Protocol("evaluation needs a label in every response".into()));
        }
        Ok(resp.label)
    }
}

pub fn stance_predictor(
    run: &mut RunDir,
    spec: &str,
    schema: &LabelSchema,
    token_limit: usize,
) -> CliResult<Box<dyn Predictor>> {
    match spec.parse()? {
        ScorerSpec::Builtin(path) => {
            let model = load_model(run, &path)?;
            if model.task != Task::Stance {
                return Err(CliError::usage(format!("{} is not a stance model", path.display())));
            }
            if model.classifier.schema() != schema {
                return Err(CliError::usage(format!(
                    "{} predicts {:?}, evaluation expects {:?}",
                    path.display(),
                    model.classifier.schema().labels(),
                    schema.labels()
                )));
            }
            Ok(Box::new(model))
        }
        ScorerSpec::Remote(url) => {
            let scorer = RemoteScorer::new(&url, RemoteConfig::default())?;
            scorer.health()?;
            Ok(Box::new(RemotePredictor { scorer, token_limit }))
        }
        ScorerSpec::Majority(path) => {
            run.input(&path)?;
            let train: Vec<_> = read_dataset(&path)?
                .into_iter()
                .filter(|ex| schema.index_of(ex.label.as_str()).is_some())
                .collect();
            Ok(Box::new(MajorityPredictor::fit(&train, schema)?))
        }
    }
}
