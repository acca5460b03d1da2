//! Correlations, classifier metrics and win/loss sentiment tables.

mod correlation;
mod metrics;
mod tables;

pub use correlation::{midranks, pearson, point_biserial, spearman, t_test_p, CorrelationResult};
pub use metrics::{prf1, MetricsReport};
pub use tables::{
    label_correlations, last_k_table, last_k_table_from_polarities, mean_share,
    mean_trajectory_sentiment, positive_share, step_polarities, LastKEntry, LastKRow, DEFAULT_KS,
};

use thiserror::Error;

use crate::sentiment::ScorerError;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("correlation undefined: {0}")]
    Undefined(String),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
}
