//! Multinomial naive Bayes over bag-of-words, add-alpha smoothed.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{PolarityScore, ScoreSource, ScorerError, SentimentScorer};
use crate::textcore::{tokenize, Vocabulary, UNK_ID};

pub const NB_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum NbError {
    #[error("training error: {0}")]
    Training(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model format error: {0}")]
    Format(String),
}

/// Two-class multinomial model. Likelihood tables are indexed by vocabulary
/// id; the `PAD`/`UNK` slots hold the smoothed zero-count probability
/// `alpha / (N_c + alpha |V|)` used for out-of-vocabulary tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBModel {
    pub version: u32,
    pub vocab: Vocabulary,
    pub alpha: f64,
    pub log_prior_pos: f64,
    pub log_prior_neg: f64,
    pub log_likelihood_pos: Vec<f64>,
    pub log_likelihood_neg: Vec<f64>,
}

/// Fits the model on raw positive and negative documents.
pub fn fit_naive_bayes<S: AsRef<str>>(
    pos_docs: &[S],
    neg_docs: &[S],
    alpha: f64,
) -> Result<NBModel, NbError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(NbError::Config(format!("alpha must be > 0, got {alpha}")));
    }
    if pos_docs.is_empty() || neg_docs.is_empty() {
        return Err(NbError::Training(
            "both positive and negative corpora must be non-empty".into(),
        ));
    }
    let pos: Vec<Vec<String>> = pos_docs.iter().map(|d| tokenize(d.as_ref())).collect();
    let neg: Vec<Vec<String>> = neg_docs.iter().map(|d| tokenize(d.as_ref())).collect();
    let all: Vec<&Vec<String>> = pos.iter().chain(&neg).collect();
    let vocab = Vocabulary::build(&all.iter().map(|d| d.as_slice()).collect::<Vec<_>>(), 1);

    let words = (vocab.len() - 2) as f64;
    let table = |docs: &[Vec<String>]| -> Vec<f64> {
        let mut counts = vec![0.0f64; vocab.len()];
        let mut total = 0.0;
        for doc in docs {
            for id in vocab.encode(doc) {
                counts[id as usize] += 1.0;
            }
            total += doc.len() as f64;
        }
        let denom = total + alpha * words;
        let unk = (alpha / denom).ln();
        counts
            .iter()
            .enumerate()
            .map(|(id, &c)| if id < 2 { unk } else { ((c + alpha) / denom).ln() })
            .collect()
    };

    let n_pos = pos.len() as f64;
    let n_neg = neg.len() as f64;
    Ok(NBModel {
        version: NB_FORMAT_VERSION,
        log_likelihood_pos: table(&pos),
        log_likelihood_neg: table(&neg),
        vocab,
        alpha,
        log_prior_pos: (n_pos / (n_pos + n_neg)).ln(),
        log_prior_neg: (n_neg / (n_pos + n_neg)).ln(),
    })
}

impl NBModel {
    /// Unnormalized log joint scores `(log P(pos, text), log P(neg, text))`.
    pub fn joint_log_scores(&self, text: &str) -> (f64, f64) {
        let tokens = tokenize(text);
        let mut lp = self.log_prior_pos;
        let mut ln = self.log_prior_neg;
        for tok in &tokens {
            let id = self.vocab.id(tok).unwrap_or(UNK_ID) as usize;
            lp += self.log_likelihood_pos[id];
            ln += self.log_likelihood_neg[id];
        }
        (lp, ln)
    }

    /// Log posteriors `(log P(pos | text), log P(neg | text))`.
    pub fn log_posteriors(&self, text: &str) -> (f64, f64) {
        let (lp, ln) = self.joint_log_scores(text);
        let m = lp.max(ln);
        let lse = m + ((lp - m).exp() + (ln - m).exp()).ln();
        (lp - lse, ln - lse)
    }

    pub fn prob_positive(&self, text: &str) -> f64 {
        let (lp, ln) = self.joint_log_scores(text);
        // logistic of the log-odds, written to avoid overflow
        let d = lp - ln;
        if d >= 0.0 {
            1.0 / (1.0 + (-d).exp())
        } else {
            let e = d.exp();
            e / (1.0 + e)
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), NbError> {
        let json = serde_json::to_string(self).map_err(|e| NbError::Format(e.to_string()))?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NbError> {
        let text = fs::read_to_string(path)?;
        let model: NBModel =
            serde_json::from_str(&text).map_err(|e| NbError::Format(e.to_string()))?;
        if model.version != NB_FORMAT_VERSION {
            return Err(NbError::Format(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        if model.log_likelihood_pos.len() != model.vocab.len()
            || model.log_likelihood_neg.len() != model.vocab.len()
        {
            return Err(NbError::Format("likelihood table size mismatch".into()));
        }
        Ok(model)
    }
}

/// Polarity `2 P(pos | text) - 1`.
pub fn nb_polarity(model: &NBModel, text: &str) -> PolarityScore {
    PolarityScore {
        value: (2.0 * model.prob_positive(text) - 1.0).clamp(-1.0, 1.0),
        source: ScoreSource::Nb,
    }
}

impl SentimentScorer for NBModel {
    fn score(&mut self, text: &str) -> Result<PolarityScore, ScorerError> {
        Ok(nb_polarity(self, text))
    }
}
