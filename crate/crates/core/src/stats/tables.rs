use serde::Serialize;

use super::correlation::{point_biserial, spearman, CorrelationResult};
use super::StatsError;
use crate::envsim::{Label, Trajectory};
use crate::sentiment::SentimentScorer;

pub const DEFAULT_KS: [usize; 7] = [5, 10, 15, 20, 35, 50, 100];

/// Maps a polarity in `[-1, 1]` to a positive-sentiment share in `[0, 1]`.
pub fn positive_share(polarity: f64) -> f64 {
    (polarity + 1.0) / 2.0
}

/// Polarity of every step's resulting observation.
pub fn step_polarities<S: SentimentScorer + ?Sized>(
    trajectories: &[Trajectory],
    scorer: &mut S,
) -> Result<Vec<Vec<f64>>, StatsError> {
    trajectories
        .iter()
        .map(|t| {
            t.steps
                .iter()
                .map(|s| Ok(scorer.score(&s.next_obs_text)?.value))
                .collect()
        })
        .collect()
}

/// Mean positive share of the last `k` steps (all steps when `k` is
/// `None`). A trajectory without steps counts as neutral.
pub fn mean_share(polarities: &[f64], k: Option<usize>) -> f64 {
    let take = k.unwrap_or(polarities.len()).min(polarities.len());
    if take == 0 {
        return 0.5;
    }
    let tail = &polarities[polarities.len() - take..];
    tail.iter().map(|&p| positive_share(p)).sum::<f64>() / take as f64
}

/// Per-trajectory mean positive share over all steps.
pub fn mean_trajectory_sentiment<S: SentimentScorer + ?Sized>(
    trajectories: &[Trajectory],
    scorer: &mut S,
) -> Result<Vec<f64>, StatsError> {
    Ok(step_polarities(trajectories, scorer)?
        .iter()
        .map(|p| mean_share(p, None))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LastKRow {
    pub k: usize,
    pub n_win: usize,
    pub n_loss: usize,
    pub mean_pos_win: Option<f64>,
    pub mean_pos_loss: Option<f64>,
    pub difference: Option<f64>,
    /// pooled standard deviation of the per-trajectory means
    pub sigma: f64,
}

#[derive(Debug)]
pub struct LastKEntry {
    pub row: LastKRow,
    pub spearman: Result<CorrelationResult, StatsError>,
    pub point_biserial: Result<CorrelationResult, StatsError>,
}

fn mean_var(xs: &[f64]) -> (Option<f64>, f64) {
    if xs.is_empty() {
        return (None, 0.0);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let ss = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    (Some(m), ss)
}

/// Correlation of a per-trajectory value with the win label, plus class
/// means. `labels` holds 1 for a win and 0 for a loss.
pub fn label_correlations(labels: &[u8], values: &[f64]) -> (Result<CorrelationResult, StatsError>, Result<CorrelationResult, StatsError>) {
    let n1 = labels.iter().filter(|&&l| l == 1).count();
    if n1 == 0 || n1 == labels.len() {
        let e = || Err(StatsError::Undefined("need both win and loss trajectories".into()));
        return (e(), e());
    }
    if values.windows(2).all(|w| w[0] == w[1]) {
        let e = || Err(StatsError::Undefined("sentiment values are constant".into()));
        return (e(), e());
    }
    let coded: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    (spearman(&coded, values), point_biserial(labels, values))
}

/// Win/loss sentiment comparison over the last `k` steps for each `k`.
/// Unlabeled trajectories are ignored.
pub fn last_k_table_from_polarities(
    trajectories: &[Trajectory],
    polarities: &[Vec<f64>],
    ks: &[usize],
) -> Result<Vec<LastKEntry>, StatsError> {
    if ks.is_empty() {
        return Err(StatsError::Usage("no k values given".into()));
    }
    if trajectories.len() != polarities.len() {
        return Err(StatsError::Usage("one polarity series per trajectory required".into()));
    }
    let labeled: Vec<(u8, &Vec<f64>)> = trajectories
        .iter()
        .zip(polarities)
        .filter_map(|(t, p)| match t.label {
            Label::Win => Some((1, p)),
            Label::Loss => Some((0, p)),
            Label::Unlabeled => None,
        })
        .collect();
    let labels: Vec<u8> = labeled.iter().map(|(l, _)| *l).collect();
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let values: Vec<f64> = labeled.iter().map(|(_, p)| mean_share(p, Some(k))).collect();
        let wins: Vec<f64> = values.iter().zip(&labels).filter(|(_, l)| **l == 1).map(|(v, _)| *v).collect();
        let losses: Vec<f64> = values.iter().zip(&labels).filter(|(_, l)| **l == 0).map(|(v, _)| *v).collect();
        let (mw, ssw) = mean_var(&wins);
        let (ml, ssl) = mean_var(&losses);
        let df = wins.len() as f64 + losses.len() as f64 - 2.0;
        let sigma = if df > 0.0 { ((ssw + ssl) / df).sqrt() } else { 0.0 };
        let (s, pb) = label_correlations(&labels, &values);
        out.push(LastKEntry {
            row: LastKRow {
                k,
                n_win: wins.len(),
                n_loss: losses.len(),
                mean_pos_win: mw,
                mean_pos_loss: ml,
                difference: mw.zip(ml).map(|(w, l)| w - l),
                sigma,
            },
            spearman: s,
            point_biserial: pb,
        });
    }
    Ok(out)
}

pub fn last_k_table<S: SentimentScorer + ?Sized>(
    trajectories: &[Trajectory],
    ks: &[usize],
    scorer: &mut S,
) -> Result<Vec<LastKEntry>, StatsError> {
    let pol = step_polarities(trajectories, scorer)?;
    last_k_table_from_polarities(trajectories, &pol, ks)
}
