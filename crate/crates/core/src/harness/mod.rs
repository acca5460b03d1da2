//! Orchestration behind the `senti-shape` binary: game generation,
//! rollouts, classifier fitting, training with shaped rewards, analysis
//! tables and the play REPL.

mod commands;
mod config;
mod play;
mod report;
mod train;

pub use commands::{
    analyze, cmd_fit_nb, cmd_rollout, collect_trajectories, fit_nb, gen_games, load_spec,
    make_policy, rollouts, AnalyzeOutcome, FitNbOutcome, SENTIMENT_MAPPING,
};
pub use config::{parse_on_off, RunConfig, ScorerFallback};
pub use play::play;
pub use report::{curve_svg, epochs_csv, summary_csv};
pub use train::{
    action_space, build_vocabulary, cmd_train, reports_from_logs, train, ActionSource,
    EpisodeLog, EpochReport, StepLog, TrainOptions, TrainOutcome,
};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::envsim::EnvError;
use crate::qagent::QError;
use crate::sentiment::{NBModel, NbError, NoScorer, ScorerClient, ScorerError, ScorerSpec, SentimentScorer, DEFAULT_TIMEOUT};
use crate::stats::StatsError;
use crate::textcore::TrajFileError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] QError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error(transparent)]
    Nb(#[from] NbError),
    #[error(transparent)]
    Trajectories(#[from] TrajFileError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub fn make_scorer(spec: &ScorerSpec) -> Result<Box<dyn SentimentScorer>, HarnessError> {
    Ok(match spec {
        ScorerSpec::Nb(path) => Box::new(NBModel::load(path)?),
        ScorerSpec::External(ep) => Box::new(ScorerClient::connect(ep, DEFAULT_TIMEOUT)?),
        ScorerSpec::None => Box::new(NoScorer),
    })
}
