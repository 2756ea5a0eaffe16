//! HTTP client for an external scorer service.
//!
//! Protocol: `POST /v1/score` with `{"text", "target", "mode"}` answered by
//! `{"score", "label", "proba"}`; `GET /v1/health` answers `{"status":"ok"}`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use url::Url;

use crate::error::{Error, Result};

use super::StanceScorer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMode {
    Stance,
    Ideology,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub text: String,
    pub target: Option<String>,
    pub mode: ScoreMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub score: f64,
    /// Optional on the wire; a bare `{"score": ...}` is accepted.
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub proba: BTreeMap<String, f64>,
}

impl ScoreResponse {
    pub fn validate(&self) -> Result<()> {
        if !self.score.is_finite() || !(-1.0..=1.0).contains(&self.score) {
            return Err(Error::Protocol(format!("score {} outside [-1, 1]", self.score)));
        }
        if self.proba.values().any(|p| !p.is_finite() || !(0.0..=1.0).contains(p)) {
            return Err(Error::Protocol("probability outside [0, 1]".into()));
        }
        if !self.proba.is_empty() {
            let sum: f64 = self.proba.values().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Protocol(format!("probabilities sum to {sum}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemoteConfig {
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: usize,
    pub max_in_flight: usize,
    pub backoff: Duration,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(30),
            retries: 2,
            max_in_flight: 4,
            backoff: Duration::from_millis(100),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RemoteScorer {
    score_url: Url,
    health_url: Url,
    client: reqwest::blocking::Client,
    config: RemoteConfig,
}

enum Attempt {
    Retry(String),
    Fatal(Error),
}

impl RemoteScorer {
    pub fn new(endpoint: &str, config: RemoteConfig) -> Result<Self> {
        let mut base = Url::parse(endpoint).map_err(|e| Error::invalid(format!("endpoint {endpoint:?}: {e}")))?;
        if !base.path().ends_with('/') {
            let p = format!("{}/", base.path());
            base.set_path(&p);
        }
        let join = |p: &str| base.join(p).map_err(|e| Error::invalid(e.to_string()));
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| Error::Remote {
                attempts: 0,
                message: e.to_string(),
            })?;
        Ok(Self {
            score_url: join("v1/score")?,
            health_url: join("v1/health")?,
            client,
            config: RemoteConfig {
                max_in_flight: config.max_in_flight.max(1),
                ..config
            },
        })
    }

    fn with_retries<T>(&self, mut attempt: impl FnMut() -> std::result::Result<T, Attempt>) -> Result<T> {
        let total = self.config.retries + 1;
        let mut last = String::new();
        for i in 0..total {
            match attempt() {
                Ok(v) => return Ok(v),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => {
                    log::debug!("scorer request attempt {} failed: {msg}", i + 1);
                    last = msg;
                    if i + 1 < total {
                        std::thread::sleep(self.config.backoff * (i as u32 + 1));
                    }
                }
            }
        }
        Err(Error::Remote {
            attempts: total,
            message: last,
        })
    }

    /// One scoring request; retried on transport errors and 5xx responses.
    pub fn request(&self, req: &ScoreRequest) -> Result<ScoreResponse> {
        self.with_retries(|| {
            let resp = self
                .client
                .post(self.score_url.clone())
                .json(req)
                .send()
                .map_err(|e| Attempt::Retry(e.to_string()))?;
            let status = resp.status();
            if status.is_server_error() {
                return Err(Attempt::Retry(format!("HTTP {status}")));
            }
            if !status.is_success() {
                let body = resp.text().unwrap_or_default();
                return Err(Attempt::Fatal(Error::Protocol(format!("HTTP {status}: {body}"))));
            }
            let parsed: ScoreResponse = resp
                .json()
                .map_err(|e| Attempt::Fatal(Error::Protocol(format!("malformed response: {e}"))))?;
            parsed.validate().map_err(Attempt::Fatal)?;
            Ok(parsed)
        })
    }

    pub fn remote_score(&self, target: Option<&str>, text: &str, mode: ScoreMode) -> Result<f64> {
        let req = ScoreRequest {
            text: text.to_string(),
            target: target.map(str::to_string),
            mode,
        };
        Ok(self.request(&req)?.score)
    }

    pub fn health(&self) -> Result<()> {
        #[derive(Deserialize)]
        struct Health {
            status: String,
        }
        self.with_retries(|| {
            let resp = self
                .client
                .get(self.health_url.clone())
                .send()
                .map_err(|e| Attempt::Retry(e.to_string()))?;
            if !resp.status().is_success() {
                return Err(Attempt::Retry(format!("HTTP {}", resp.status())));
            }
            let h: Health = resp
                .json()
                .map_err(|e| Attempt::Fatal(Error::Protocol(e.to_string())))?;
            if h.status == "ok" {
                Ok(())
            } else {
                Err(Attempt::Fatal(Error::Protocol(format!("health status {:?}", h.status))))
            }
        })
    }

    /// Runs `requests` with at most `max_in_flight` outstanding; results keep
    /// input order.
    pub fn request_many(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreResponse>> {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<ScoreResponse>>>> =
            Mutex::new((0..requests.len()).map(|_| None).collect());
        let workers = self.config.max_in_flight.min(requests.len().max(1));
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= requests.len() {
                        break;
                    }
                    let r = self.request(&requests[i]);
                    slots.lock().expect("result slots poisoned")[i] = Some(r);
                });
            }
        });
        slots
            .into_inner()
            .expect("result slots poisoned")
            .into_iter()
            .map(|r| r.expect("every request slot is filled"))
            .collect()
    }
}

impl StanceScorer for RemoteScorer {
    fn score_stance(&self, target: &str, text: &str) -> Result<f64> {
        self.remote_score(Some(target), text, ScoreMode::Stance)
    }

    fn score_ideology(&self, text: &str) -> Result<f64> {
        self.remote_score(None, text, ScoreMode::Ideology)
    }

    fn score_stance_batch(&self, target: &str, texts: &[&str]) -> Result<Vec<f64>> {
        let reqs: Vec<ScoreRequest> = texts
            .iter()
            .map(|t| ScoreRequest {
                text: t.to_string(),
                target: Some(target.to_string()),
                mode: ScoreMode::Stance,
            })
            .collect();
        Ok(self.request_many(&reqs)?.into_iter().map(|r| r.score).collect())
    }

    fn score_ideology_batch(&self, texts: &[&str]) -> Result<Vec<f64>> {
        let reqs: Vec<ScoreRequest> = texts
            .iter()
            .map(|t| ScoreRequest {
                text: t.to_string(),
                target: None,
                mode: ScoreMode::Ideology,
            })
            .collect();
        Ok(self.request_many(&reqs)?.into_iter().map(|r| r.score).collect())
    }
}
