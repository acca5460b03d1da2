use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::QError;
use crate::textcore::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QDims {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub mlp_dim: usize,
    pub action_count: usize,
}

impl QDims {
    pub fn lstm_inputs(&self) -> usize {
        self.embed_dim + self.hidden_dim
    }
}

/// All learnable parameters, stored as flat row-major buffers.
///
/// LSTM gate rows are stacked as input, forget, cell, output blocks of
/// `hidden_dim` rows each; every row multiplies `[x_t; h_{t-1}]`.
/// The same type doubles as a gradient container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QParams {
    pub dims: QDims,
    /// vocab_size x embed_dim
    pub embedding: Vec<f64>,
    /// 4 hidden_dim x (embed_dim + hidden_dim)
    pub lstm_w: Vec<f64>,
    pub lstm_b: Vec<f64>,
    /// mlp_dim x hidden_dim
    pub head_w1: Vec<f64>,
    pub head_b1: Vec<f64>,
    /// action_count x mlp_dim
    pub head_w2: Vec<f64>,
    pub head_b2: Vec<f64>,
}

pub const GROUP_NAMES: [&str; 7] = [
    "embedding", "lstm_w", "lstm_b", "head_w1", "head_b1", "head_w2", "head_b2",
];

impl QParams {
    pub fn zeros(dims: QDims) -> Self {
        let h4 = 4 * dims.hidden_dim;
        QParams {
            dims,
            embedding: vec![0.0; dims.vocab_size * dims.embed_dim],
            lstm_w: vec![0.0; h4 * dims.lstm_inputs()],
            lstm_b: vec![0.0; h4],
            head_w1: vec![0.0; dims.mlp_dim * dims.hidden_dim],
            head_b1: vec![0.0; dims.mlp_dim],
            head_w2: vec![0.0; dims.action_count * dims.mlp_dim],
            head_b2: vec![0.0; dims.action_count],
        }
    }

    /// Every parameter uniform in `[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(dims: QDims, scale: f64, rng: &mut R) -> Self {
        let mut p = QParams::zeros(dims);
        for g in p.groups_mut() {
            for v in g.iter_mut() {
                *v = rng.random_range(-scale..=scale);
            }
        }
        p
    }

    pub fn groups(&self) -> [&[f64]; 7] {
        [
            &self.embedding,
            &self.lstm_w,
            &self.lstm_b,
            &self.head_w1,
            &self.head_b1,
            &self.head_w2,
            &self.head_b2,
        ]
    }

    pub fn groups_mut(&mut self) -> [&mut Vec<f64>; 7] {
        [
            &mut self.embedding,
            &mut self.lstm_w,
            &mut self.lstm_b,
            &mut self.head_w1,
            &mut self.head_b1,
            &mut self.head_w2,
            &mut self.head_b2,
        ]
    }

    pub fn num_params(&self) -> usize {
        self.groups().iter().map(|g| g.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.groups().iter().all(|g| g.iter().all(|v| v.is_finite()))
    }

    pub fn check_shapes(&self) -> Result<(), QError> {
        let expect = QParams::zeros(self.dims);
        for ((name, a), b) in GROUP_NAMES.iter().zip(self.groups()).zip(expect.groups()) {
            if a.len() != b.len() {
                return Err(QError::Usage(format!(
                    "{name} has {} entries, expected {}",
                    a.len(),
                    b.len()
                )));
            }
        }
        Ok(())
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &QParams) {
        for (dst, src) in self.groups_mut().into_iter().zip(other.groups()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
    }

    pub fn fill(&mut self, value: f64) {
        for g in self.groups_mut() {
            g.iter_mut().for_each(|v| *v = value);
        }
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Everything needed to run a trained agent: parameters plus the vocabulary
/// and action list they were trained against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub vocab: Vocabulary,
    pub actions: Vec<String>,
    pub max_tokens: usize,
    pub params: QParams,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<(), QError> {
        let json = serde_json::to_string(self).map_err(|e| QError::Format(e.to_string()))?;
        fs::write(path, json).map_err(|e| QError::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, QError> {
        let text = fs::read_to_string(path).map_err(|e| QError::Format(e.to_string()))?;
        let ck: Checkpoint =
            serde_json::from_str(&text).map_err(|e| QError::Format(e.to_string()))?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(QError::Format(format!(
                "unsupported checkpoint version {}",
                ck.version
            )));
        }
        ck.params.check_shapes()?;
        if ck.params.dims.vocab_size != ck.vocab.len()
            || ck.params.dims.action_count != ck.actions.len()
        {
            return Err(QError::Format(
                "checkpoint shape header disagrees with vocabulary or actions".into(),
            ));
        }
        Ok(ck)
    }
}
