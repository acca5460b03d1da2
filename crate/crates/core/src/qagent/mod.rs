//! LSTM-DQN: token embeddings, an LSTM with mean pooling over timesteps, and
//! a two-layer Q head over a fixed command set. Gradients are computed by
//! hand, see `examples/gradient_check.rs`.

mod agent;
mod network;
mod params;
mod replay;

pub use agent::{
    epsilon_at, loss_and_grad, select_action, td_target, train_step, AgentConfig, AgentPolicy,
    DqnAgent, Optimizer,
};
pub use network::{backward, encode_state, forward, q_values, Forward};
pub use params::{Checkpoint, QDims, QParams, CHECKPOINT_VERSION, GROUP_NAMES};
pub use replay::{Priority, ReplayBuffer, ReplayEntry};

use thiserror::Error;

use crate::textcore::{tokenize, Vocabulary};

#[derive(Debug, Error)]
pub enum QError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("checkpoint error: {0}")]
    Format(String),
}

/// Tokenizes and encodes `text`, keeping at most `max_tokens` ids. Never
/// returns an empty sequence.
pub fn encode_text(vocab: &Vocabulary, text: &str, max_tokens: usize) -> Vec<u32> {
    let tokens = tokenize(text);
    let take = tokens.len().min(max_tokens.max(1));
    vocab.encode(&tokens[..take])
}
