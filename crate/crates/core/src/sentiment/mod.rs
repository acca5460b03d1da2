//! Polarity scoring and reward shaping.
//!
//! A scorer maps an observation text to a polarity in `[-1, 1]`. The shaped
//! reward is `r_env + scale * polarity`, optionally after a confidence gate
//! that zeroes polarities with `|polarity| <= tau`.

mod client;
mod naive_bayes;
pub mod protocol;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{Endpoint, ScorerClient, DEFAULT_TIMEOUT};
pub use naive_bayes::{fit_naive_bayes, nb_polarity, NBModel, NbError, NB_FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreSource {
    Nb,
    External,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityScore {
    pub value: f64,
    pub source: ScoreSource,
}

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("scorer unavailable: {0}")]
    Unavailable(String),
    #[error("scorer protocol error: {0}")]
    Protocol(String),
    #[error("scorer reported an error: {0}")]
    Remote(String),
}

/// Anything that turns text into a polarity.
pub trait SentimentScorer {
    fn score(&mut self, text: &str) -> Result<PolarityScore, ScorerError>;
}

/// Always 0; disables shaping.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoScorer;

impl SentimentScorer for NoScorer {
    fn score(&mut self, _text: &str) -> Result<PolarityScore, ScorerError> {
        Ok(PolarityScore {
            value: 0.0,
            source: ScoreSource::None,
        })
    }
}

/// Wraps a closure; handy for tests and synthetic analyses.
pub struct FnScorer<F>(pub F);

impl<F: FnMut(&str) -> f64> SentimentScorer for FnScorer<F> {
    fn score(&mut self, text: &str) -> Result<PolarityScore, ScorerError> {
        let value = (self.0)(text);
        if !(-1.0..=1.0).contains(&value) {
            return Err(ScorerError::Protocol(format!("polarity {value} outside [-1, 1]")));
        }
        Ok(PolarityScore {
            value,
            source: ScoreSource::External,
        })
    }
}

impl<S: SentimentScorer + ?Sized> SentimentScorer for Box<S> {
    fn score(&mut self, text: &str) -> Result<PolarityScore, ScorerError> {
        (**self).score(text)
    }
}

/// Zeroes polarities that do not clear the confidence threshold. The
/// comparisons are strict, so `±tau` itself maps to 0.
pub fn gate(polarity: f64, tau: f64) -> f64 {
    if polarity > tau || polarity < -tau {
        polarity
    } else {
        0.0
    }
}

pub fn combine_reward(r_env: f64, polarity: f64, scale: f64) -> f64 {
    r_env + scale * polarity
}

/// Which scorer a run uses. Parsed from `nb:<path>`, `ext:<endpoint>` or
/// `none`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ScorerSpec {
    Nb(PathBuf),
    External(String),
    None,
}

impl FromStr for ScorerSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            Ok(ScorerSpec::None)
        } else if let Some(path) = s.strip_prefix("nb:") {
            Ok(ScorerSpec::Nb(PathBuf::from(path)))
        } else if let Some(ep) = s.strip_prefix("ext:") {
            Ok(ScorerSpec::External(ep.to_string()))
        } else {
            Err(format!(
                "scorer must be nb:<path>, ext:<endpoint> or none, got '{s}'"
            ))
        }
    }
}

impl TryFrom<String> for ScorerSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ScorerSpec> for String {
    fn from(s: ScorerSpec) -> String {
        s.to_string()
    }
}

impl fmt::Display for ScorerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorerSpec::Nb(p) => write!(f, "nb:{}", p.display()),
            ScorerSpec::External(ep) => write!(f, "ext:{ep}"),
            ScorerSpec::None => f.write_str("none"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapingConfig {
    pub scale: f64,
    #[serde(rename = "threshold")]
    pub tau: f64,
    #[serde(rename = "gate")]
    pub gate_enabled: bool,
    pub scorer: ScorerSpec,
}

impl Default for ShapingConfig {
    fn default() -> Self {
        ShapingConfig {
            scale: 0.1,
            tau: 0.7,
            gate_enabled: true,
            scorer: ScorerSpec::None,
        }
    }
}

impl ShapingConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.scale) {
            return Err(format!("scale must be in [0, 1], got {}", self.scale));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(format!("threshold must be in [0, 1), got {}", self.tau));
        }
        Ok(())
    }

    /// The polarity actually used for shaping (gated when enabled).
    pub fn effective_polarity(&self, polarity: f64) -> f64 {
        if self.gate_enabled {
            gate(polarity, self.tau)
        } else {
            polarity
        }
    }

    pub fn shaped_reward(&self, r_env: f64, polarity: f64) -> f64 {
        combine_reward(r_env, self.effective_polarity(polarity), self.scale)
    }
}
